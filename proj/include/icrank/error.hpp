#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace icrank {

enum class ErrorCode {
    InvalidArgument,
    DuplicateDocId,
    DuplicateQueryId,
    EmptyRelevantSet,
    MissingAttribute,
    MissingTarget,
    TooFewDocuments,
    UnknownDocument,
    UnlabeledDocument,
    MissingSubtopics,
    DegenerateVariance,
    Io,
    Parse,
    Auth,
    Transport,
    MalformedResponse,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. `subject` carries the offending
/// identifier (doc_id, query_id, path, ...) when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string subject, const std::string& detail = {});

    ErrorCode code() const noexcept { return code_; }
    const std::string& subject() const noexcept { return subject_; }

private:
    ErrorCode code_;
    std::string subject_;
};

/// Data-layer errors map to exit code 2, network errors to 3.
bool is_transport_error(ErrorCode code) noexcept;

} // namespace icrank
