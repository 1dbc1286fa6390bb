#pragma once

#include <cstdint>
#include <limits>
#include <type_traits>
#include <vector>

namespace sparsebench {

// C(n, k), saturating at uint64 max instead of overflowing.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        const std::uint64_t factor = n - k + i;
        if (result > kMax / factor) return kMax;
        result = result * factor / i;
    }
    return result;
}

// Visits every k-subset of {0,...,n-1} in lexicographic order. The callback
// may return false to stop early; a void callback visits everything.
template <typename Fn>
void for_each_ksubset(std::size_t n, std::size_t k, Fn&& fn) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    const auto visit = [&](const std::vector<std::size_t>& s) -> bool {
        if constexpr (std::is_same_v<std::invoke_result_t<Fn&, const std::vector<std::size_t>&>, bool>) {
            return fn(s);
        } else {
            fn(s);
            return true;
        }
    };
    if (k == 0) {
        visit(idx);
        return;
    }
    while (true) {
        if (!visit(idx)) return;
        std::size_t i = k - 1;
        while (idx[i] == i + n - k) {
            if (i == 0) return;
            --i;
        }
        ++idx[i];
        for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace sparsebench
