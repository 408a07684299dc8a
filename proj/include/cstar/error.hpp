#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cstar {

enum class ErrorKind {
    // input data
    EmptyFile,
    MalformedHeader,
    IllegalResidue,
    EmptyRecord,
    EmptyDataset,
    IoFailure,
    // pairwise / anchoring
    EmptyInput,
    AlphabetMismatch,
    SequenceTooLong,
    InvalidScheme,
    KTooLarge,
    KTooSmall,
    // msa / metrics / phylo
    TooFewSequences,
    InconsistentCenter,
    LengthMismatch,
    LeafMismatch,
    ProteinUnsupported,
    NonFiniteDistance,
    MalformedTree,
    // engine
    TaskPanic,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every library failure is reported as an Error carrying its kind; the CLI
/// maps kinds onto exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace cstar
