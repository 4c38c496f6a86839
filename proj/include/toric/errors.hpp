#ifndef TORIC_ERRORS_HPP
#define TORIC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace toric {

struct DegenerateInput : std::runtime_error {
    explicit DegenerateInput(const std::string& what) : std::runtime_error(what) {}
};
struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};
struct Unbounded : std::runtime_error {
    explicit Unbounded(const std::string& what) : std::runtime_error(what) {}
};
struct Empty : std::runtime_error {
    explicit Empty(const std::string& what) : std::runtime_error(what) {}
};
struct OriginNotInterior : std::runtime_error {
    explicit OriginNotInterior(const std::string& what) : std::runtime_error(what) {}
};
struct NotFanoNormalized : std::runtime_error {
    explicit NotFanoNormalized(const std::string& what) : std::runtime_error(what) {}
};
struct SingularMatrix : std::runtime_error {
    explicit SingularMatrix(const std::string& what) : std::runtime_error(what) {}
};
struct BadParams : std::runtime_error {
    explicit BadParams(const std::string& what) : std::runtime_error(what) {}
};
struct TooLarge : std::runtime_error {
    explicit TooLarge(const std::string& what) : std::runtime_error(what) {}
};
struct TailDivergence : std::runtime_error {
    explicit TailDivergence(const std::string& what) : std::runtime_error(what) {}
};
struct NotSemistable : std::runtime_error {
    explicit NotSemistable(const std::string& what) : std::runtime_error(what) {}
};
struct MixedDimensions : std::runtime_error {
    explicit MixedDimensions(const std::string& what) : std::runtime_error(what) {}
};
struct NonConvexInput : std::runtime_error {
    explicit NonConvexInput(const std::string& what) : std::runtime_error(what) {}
};
struct HessianSingular : std::runtime_error {
    explicit HessianSingular(const std::string& what) : std::runtime_error(what) {}
};
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, int line, int column)
        : std::runtime_error(what + " (line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ")"),
          line(line), column(column) {}
    int line;
    int column;
};

} // namespace toric

#endif
