#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace attrcs {

using NodeId = std::uint32_t;

enum class Model { kCore, kTruss };

inline const char* model_name(Model m) { return m == Model::kCore ? "core" : "truss"; }

// Smallest node count a nonempty community can have: a (k+1)-clique for the
// core model, k nodes for the truss model.
inline std::size_t model_minimum_size(Model model, int k) {
    if (model == Model::kCore) {
        if (k < 1) throw std::invalid_argument("core model requires k >= 1");
        return static_cast<std::size_t>(k) + 1;
    }
    if (k < 2) throw std::invalid_argument("truss model requires k >= 2");
    return static_cast<std::size_t>(k);
}

struct SizeBounds {
    std::size_t lo = 0;
    std::size_t hi = 0;
};

inline void validate_bounds(const SizeBounds& b, Model model, int k) {
    const std::size_t msize = model_minimum_size(model, k);
    if (b.lo < msize || b.lo > b.hi)
        throw std::invalid_argument("size bounds must satisfy " + std::to_string(msize) +
                                    " <= l <= h, got [" + std::to_string(b.lo) + "," +
                                    std::to_string(b.hi) + "]");
}

struct ParseError : std::runtime_error {
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_no(line) {}
    std::size_t line_no;
};

struct SchemaError : ParseError {
    using ParseError::ParseError;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace attrcs
