#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace erslp {

/// Sorted, distinct indices into the high-dimensional control block.
struct Subspace {
    std::vector<std::size_t> indices;
    std::size_t draw_id = 0;

    [[nodiscard]] std::size_t size() const noexcept { return indices.size(); }
    friend bool operator==(const Subspace&, const Subspace&) = default;
};

/// Category label per control plus a minimum member count per label.
class CategoryScheme {
public:
    CategoryScheme(std::vector<std::string> labels_per_control, std::map<std::string, std::size_t> quotas);
    /// Every category gets the same quota.
    static CategoryScheme uniform_quota(std::vector<std::string> labels_per_control, std::size_t quota);

    [[nodiscard]] std::size_t num_controls() const noexcept { return membership_.size(); }
    [[nodiscard]] const std::vector<std::string>& categories() const noexcept { return categories_; }
    [[nodiscard]] const std::vector<std::size_t>& membership() const noexcept { return membership_; }
    [[nodiscard]] const std::vector<std::size_t>& quotas() const noexcept { return quota_; }
    [[nodiscard]] const std::vector<std::vector<std::size_t>>& members() const noexcept { return members_; }
    [[nodiscard]] std::size_t quota_total() const noexcept;

    /// Throws InputError naming the violated constraint when k cannot satisfy the quotas.
    void check_feasible(std::size_t k) const;
    [[nodiscard]] bool feasible(std::size_t k) const noexcept;
    [[nodiscard]] bool satisfied_by(const Subspace& s) const;

private:
    std::vector<std::string> categories_;          // ordered labels
    std::vector<std::size_t> membership_;          // control -> category position
    std::vector<std::size_t> quota_;               // category position -> m_c
    std::vector<std::vector<std::size_t>> members_;  // category position -> controls
};

/// Uniform k-of-q draw for one draw_id; depends only on (q, k, seed, draw_id).
[[nodiscard]] Subspace draw_uniform_subspace(std::size_t q, std::size_t k, std::uint64_t seed, std::size_t draw_id);
[[nodiscard]] std::vector<Subspace> draw_uniform_subspaces(std::size_t q, std::size_t k, std::size_t n_draws,
                                                           std::uint64_t seed);

/// Quota members first (uniform within each category), then uniform fill from all
/// unused controls.
[[nodiscard]] Subspace draw_stratified_subspace(const CategoryScheme& scheme, std::size_t k, std::uint64_t seed,
                                                std::size_t draw_id);
[[nodiscard]] std::vector<Subspace> draw_stratified_subspaces(const CategoryScheme& scheme, std::size_t k,
                                                              std::size_t n_draws, std::uint64_t seed);

}  // namespace erslp
