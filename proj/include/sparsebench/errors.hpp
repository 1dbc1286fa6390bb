#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sparsebench {

struct DimensionMismatch : std::invalid_argument {
    explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct InvalidDimensions : std::invalid_argument {
    explicit InvalidDimensions(const std::string& what) : std::invalid_argument(what) {}
};

struct InvalidSparsity : std::invalid_argument {
    explicit InvalidSparsity(const std::string& what) : std::invalid_argument(what) {}
};

// Thrown when a triangular factor collapses; `rank` is the usable column count.
struct RankDeficient : std::runtime_error {
    std::size_t rank;
    RankDeficient(const std::string& what, std::size_t usable_rank)
        : std::runtime_error(what), rank(usable_rank) {}
};

// Enumeration would exceed the subset budget; `required` is what it would take.
struct BudgetExceeded : std::runtime_error {
    std::uint64_t required;
    BudgetExceeded(const std::string& what, std::uint64_t required_subsets)
        : std::runtime_error(what), required(required_subsets) {}
};

struct RicIndexMissing : std::out_of_range {
    explicit RicIndexMissing(const std::string& what) : std::out_of_range(what) {}
};

struct KTooSmall : std::invalid_argument {
    explicit KTooSmall(const std::string& what) : std::invalid_argument(what) {}
};

struct ColumnsNotNormalized : std::invalid_argument {
    explicit ColumnsNotNormalized(const std::string& what) : std::invalid_argument(what) {}
};

struct Infeasible : std::runtime_error {
    explicit Infeasible(const std::string& what) : std::runtime_error(what) {}
};

struct NotConverged : std::runtime_error {
    explicit NotConverged(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateData : std::runtime_error {
    explicit DegenerateData(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sparsebench
