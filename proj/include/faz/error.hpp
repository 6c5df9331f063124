#pragma once

#include <stdexcept>
#include <string>

namespace faz {

/// Base class for every error the library raises.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- image I/O -------------------------------------------------------------

struct FileNotFound : Error {
    explicit FileNotFound(const std::string& path) : Error("file not found: " + path) {}
};

struct UnsupportedFormat : Error {
    explicit UnsupportedFormat(const std::string& what) : Error("unsupported format: " + what) {}
};

struct CorruptImage : Error {
    explicit CorruptImage(const std::string& what) : Error("corrupt image: " + what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error("i/o error: " + what) {}
};

// --- geometry / contract violations ---------------------------------------

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error("dimension mismatch: " + what) {}
};

struct ImageTooSmall : Error {
    explicit ImageTooSmall(const std::string& what) : Error("image too small: " + what) {}
};

/// All-black (zero-mean) input; the capture is unusable.
struct DegenerateImage : Error {
    explicit DegenerateImage(const std::string& what) : Error("degenerate image: " + what) {}
};

// --- pipeline stages --------------------------------------------------------

struct NoCandidates : Error {
    NoCandidates() : Error("candidate extraction produced an empty set") {}
};

struct AllCandidatesRejected : Error {
    AllCandidatesRejected() : Error("every candidate was rejected as a false positive") {}
};

struct EmptySeed : Error {
    EmptySeed() : Error("region growing requires a nonempty seed") {}
};

/// Wraps NoCandidates / AllCandidatesRejected / DegenerateImage; the image is
/// counted as a localization failure by batch evaluation.
struct LocalizationFailed : Error {
    explicit LocalizationFailed(const std::string& cause)
        : Error("localization failed: " + cause) {}
};

// --- metrics ---------------------------------------------------------------

struct ConstantSeries : Error {
    ConstantSeries() : Error("pearson correlation undefined for a constant series") {}
};

struct LengthMismatch : Error {
    explicit LengthMismatch(const std::string& what) : Error("length mismatch: " + what) {}
};

// --- configuration / datasets ----------------------------------------------

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

struct ManifestError : Error {
    explicit ManifestError(const std::string& what) : Error("manifest error: " + what) {}
};

struct InvalidSpec : Error {
    explicit InvalidSpec(const std::string& what) : Error("invalid synth spec: " + what) {}
};

}  // namespace faz
