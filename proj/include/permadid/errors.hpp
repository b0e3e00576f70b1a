#pragma once

#include <stdexcept>
#include <string>

namespace permadid {

enum class Errc {
    // weave
    OversizeData,
    MalformedTag,
    NothingToMine,
    NotFound,
    EmptyBundle,
    CorruptSnapshot,
    // name registry
    InvalidName,
    NameTaken,
    NotOwner,
    UnknownName,
    // did method
    InvalidKey,
    NoAuthenticationKey,
    InvalidDocument,
    ParseError,
    UntrustedUpdate,
    // bbs
    SeedTooShort,
    TooManyMessages,
    InvalidSignature,
    IndexOutOfRange,
    // credentials
    DuplicatePath,
    NonScalarValue,
    SchemaViolation,
    UnresolvableIssuer,
    PredicateOnMissingPath,
    UnsupportedOperator,
    UnknownPath,
    InvalidCredential,
    NotIssuer,
    // protocol
    NoMatchingCredential,
    // keystore / gateway
    WrongPassphrase,
    PermissionDenied,
    BindFailure,
    // generic
    Internal,
};

const char* errc_name(Errc code);

/// Exception carrying a stable error code plus a human-readable detail.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace permadid
