#include "permadid/errors.hpp"

namespace permadid {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::OversizeData: return "OversizeData";
        case Errc::MalformedTag: return "MalformedTag";
        case Errc::NothingToMine: return "NothingToMine";
        case Errc::NotFound: return "NotFound";
        case Errc::EmptyBundle: return "EmptyBundle";
        case Errc::CorruptSnapshot: return "CorruptSnapshot";
        case Errc::InvalidName: return "InvalidName";
        case Errc::NameTaken: return "NameTaken";
        case Errc::NotOwner: return "NotOwner";
        case Errc::UnknownName: return "UnknownName";
        case Errc::InvalidKey: return "InvalidKey";
        case Errc::NoAuthenticationKey: return "NoAuthenticationKey";
        case Errc::InvalidDocument: return "InvalidDocument";
        case Errc::ParseError: return "ParseError";
        case Errc::UntrustedUpdate: return "UntrustedUpdate";
        case Errc::SeedTooShort: return "SeedTooShort";
        case Errc::TooManyMessages: return "TooManyMessages";
        case Errc::InvalidSignature: return "InvalidSignature";
        case Errc::IndexOutOfRange: return "IndexOutOfRange";
        case Errc::DuplicatePath: return "DuplicatePath";
        case Errc::NonScalarValue: return "NonScalarValue";
        case Errc::SchemaViolation: return "SchemaViolation";
        case Errc::UnresolvableIssuer: return "UnresolvableIssuer";
        case Errc::PredicateOnMissingPath: return "PredicateOnMissingPath";
        case Errc::UnsupportedOperator: return "UnsupportedOperator";
        case Errc::UnknownPath: return "UnknownPath";
        case Errc::InvalidCredential: return "InvalidCredential";
        case Errc::NotIssuer: return "NotIssuer";
        case Errc::NoMatchingCredential: return "NoMatchingCredential";
        case Errc::WrongPassphrase: return "WrongPassphrase";
        case Errc::PermissionDenied: return "PermissionDenied";
        case Errc::BindFailure: return "BindFailure";
        case Errc::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace permadid
