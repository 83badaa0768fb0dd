#include "icrank/error.hpp"

namespace icrank {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DuplicateDocId: return "DuplicateDocId";
    case ErrorCode::DuplicateQueryId: return "DuplicateQueryId";
    case ErrorCode::EmptyRelevantSet: return "EmptyRelevantSet";
    case ErrorCode::MissingAttribute: return "MissingAttribute";
    case ErrorCode::MissingTarget: return "MissingTarget";
    case ErrorCode::TooFewDocuments: return "TooFewDocuments";
    case ErrorCode::UnknownDocument: return "UnknownDocument";
    case ErrorCode::UnlabeledDocument: return "UnlabeledDocument";
    case ErrorCode::MissingSubtopics: return "MissingSubtopics";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::Auth: return "AuthError";
    case ErrorCode::Transport: return "TransportError";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    }
    return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& subject, const std::string& detail) {
    std::string msg{to_string(code)};
    if (!subject.empty()) {
        msg += "(" + subject + ")";
    }
    if (!detail.empty()) {
        msg += ": " + detail;
    }
    return msg;
}

} // namespace

Error::Error(ErrorCode code, std::string subject, const std::string& detail)
    : std::runtime_error(compose(code, subject, detail)), code_(code), subject_(std::move(subject)) {}

bool is_transport_error(ErrorCode code) noexcept {
    return code == ErrorCode::Auth || code == ErrorCode::Transport ||
           code == ErrorCode::MalformedResponse;
}

} // namespace icrank
