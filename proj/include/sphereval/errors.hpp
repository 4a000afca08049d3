#pragma once

#include <stdexcept>
#include <string>

namespace sphereval {

struct TieAtNode : std::runtime_error {
    explicit TieAtNode(const std::string& what) : std::runtime_error(what) {}
};

struct NotSmooth : std::runtime_error {
    explicit NotSmooth(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::invalid_argument {
    explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct SingularMatrix : std::invalid_argument {
    explicit SingularMatrix(const std::string& what) : std::invalid_argument(what) {}
};

struct UnsupportedScheme : std::invalid_argument {
    explicit UnsupportedScheme(const std::string& what) : std::invalid_argument(what) {}
};

struct NonFiniteValue : std::runtime_error {
    explicit NonFiniteValue(const std::string& what) : std::runtime_error(what) {}
};

struct HullFailure : std::runtime_error {
    explicit HullFailure(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyPacking : std::runtime_error {
    explicit EmptyPacking(const std::string& what) : std::runtime_error(what) {}
};

struct NoRoot : std::runtime_error {
    explicit NoRoot(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sphereval
