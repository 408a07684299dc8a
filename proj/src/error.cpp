#include "cstar/error.hpp"

namespace cstar {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::EmptyFile: return "EmptyFile";
        case ErrorKind::MalformedHeader: return "MalformedHeader";
        case ErrorKind::IllegalResidue: return "IllegalResidue";
        case ErrorKind::EmptyRecord: return "EmptyRecord";
        case ErrorKind::EmptyDataset: return "EmptyDataset";
        case ErrorKind::IoFailure: return "IoFailure";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::AlphabetMismatch: return "AlphabetMismatch";
        case ErrorKind::SequenceTooLong: return "SequenceTooLong";
        case ErrorKind::InvalidScheme: return "InvalidScheme";
        case ErrorKind::KTooLarge: return "KTooLarge";
        case ErrorKind::KTooSmall: return "KTooSmall";
        case ErrorKind::TooFewSequences: return "TooFewSequences";
        case ErrorKind::InconsistentCenter: return "InconsistentCenter";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::LeafMismatch: return "LeafMismatch";
        case ErrorKind::ProteinUnsupported: return "ProteinUnsupported";
        case ErrorKind::NonFiniteDistance: return "NonFiniteDistance";
        case ErrorKind::MalformedTree: return "MalformedTree";
        case ErrorKind::TaskPanic: return "TaskPanic";
    }
    return "Unknown";
}

}  // namespace cstar
