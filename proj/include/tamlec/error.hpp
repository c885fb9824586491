#pragma once

#include <stdexcept>
#include <string>

namespace tamlec {

enum class ErrorCode {
    CycleDetected,
    MultipleRoots,
    NoRoot,
    DuplicateName,
    UnknownLabel,
    NotWeakSemilattice,
    EmptyPath,
    NotPathComplete,
    ShapeMismatch,
    SequenceTooLong,
    PathTooLong,
    UnknownTask,
    TargetOutsideTask,
    EmbeddingDimMismatch,
    MalformedJson,
    DuplicateDocId,
    DimMismatch,
    DivergenceDetected,
    NoEligibleDocuments,
    InvalidArgument,
    IoError,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::CycleDetected: return "CycleDetected";
        case ErrorCode::MultipleRoots: return "MultipleRoots";
        case ErrorCode::NoRoot: return "NoRoot";
        case ErrorCode::DuplicateName: return "DuplicateName";
        case ErrorCode::UnknownLabel: return "UnknownLabel";
        case ErrorCode::NotWeakSemilattice: return "NotWeakSemilattice";
        case ErrorCode::EmptyPath: return "EmptyPath";
        case ErrorCode::NotPathComplete: return "NotPathComplete";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::SequenceTooLong: return "SequenceTooLong";
        case ErrorCode::PathTooLong: return "PathTooLong";
        case ErrorCode::UnknownTask: return "UnknownTask";
        case ErrorCode::TargetOutsideTask: return "TargetOutsideTask";
        case ErrorCode::EmbeddingDimMismatch: return "EmbeddingDimMismatch";
        case ErrorCode::MalformedJson: return "MalformedJson";
        case ErrorCode::DuplicateDocId: return "DuplicateDocId";
        case ErrorCode::DimMismatch: return "DimMismatch";
        case ErrorCode::DivergenceDetected: return "DivergenceDetected";
        case ErrorCode::NoEligibleDocuments: return "NoEligibleDocuments";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Library-wide exception carrying a machine-readable code plus a
/// human-readable, module-qualified message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace tamlec
