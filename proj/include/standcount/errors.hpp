#pragma once

#include <stdexcept>
#include <string>

namespace standcount {

// Base for all pipeline errors so callers can catch one type at the CLI
// boundary and map it to an exit code.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// geometry
struct FrameChainMismatch : Error { using Error::Error; };
struct SingularMatrix : Error { using Error::Error; };
struct PointAtInfinity : Error { using Error::Error; };

// detections / label files
struct ParseError : Error { using Error::Error; };
struct RangeError : Error { using Error::Error; };

// raster ops
struct BadWindow : Error { using Error::Error; };
struct ChannelMismatch : Error { using Error::Error; };
struct DegenerateImage : Error { using Error::Error; };
struct EmptyMask : Error { using Error::Error; };
struct MarkerOffMask : Error { using Error::Error; };

// mosaic / rawframe pipelines
struct GridMismatch : Error { using Error::Error; };
struct MissingImage : Error { using Error::Error; };
struct ExtentBudgetExceeded : Error { using Error::Error; };

// layout
struct EmptyInput : Error { using Error::Error; };
struct NoRangesFound : Error { using Error::Error; };
struct NoRowsFound : Error { using Error::Error; };

// evaluation
struct DegenerateGroundTruth : Error { using Error::Error; };
struct InsufficientOverlap : Error { using Error::Error; };

// synth
struct SpecInvalid : Error { using Error::Error; };

// generic I/O
struct IoError : Error { using Error::Error; };

}  // namespace standcount
