#include "erslp/sampling/subspace.hpp"

#include "erslp/util/error.hpp"
#include "erslp/util/seed.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace erslp {

CategoryScheme::CategoryScheme(std::vector<std::string> labels_per_control, std::map<std::string, std::size_t> quotas) {
    std::map<std::string, std::size_t> position;
    for (const auto& label : labels_per_control) {
        if (position.emplace(label, categories_.size()).second) categories_.push_back(label);
    }
    membership_.reserve(labels_per_control.size());
    members_.resize(categories_.size());
    for (std::size_t i = 0; i < labels_per_control.size(); ++i) {
        const std::size_t c = position.at(labels_per_control[i]);
        membership_.push_back(c);
        members_[c].push_back(i);
    }
    quota_.assign(categories_.size(), 0);
    for (const auto& [label, m] : quotas) {
        const auto it = position.find(label);
        if (it == position.end()) throw InputError("category quota for unknown category '" + label + "'");
        quota_[it->second] = m;
    }
}

CategoryScheme CategoryScheme::uniform_quota(std::vector<std::string> labels_per_control, std::size_t quota) {
    std::map<std::string, std::size_t> quotas;
    for (const auto& l : labels_per_control) quotas[l] = quota;
    return CategoryScheme(std::move(labels_per_control), std::move(quotas));
}

std::size_t CategoryScheme::quota_total() const noexcept {
    return std::accumulate(quota_.begin(), quota_.end(), std::size_t{0});
}

bool CategoryScheme::feasible(std::size_t k) const noexcept {
    if (k < 1 || k > num_controls() || quota_total() > k) return false;
    for (std::size_t c = 0; c < categories_.size(); ++c) {
        if (members_[c].size() < quota_[c]) return false;
    }
    return true;
}

void CategoryScheme::check_feasible(std::size_t k) const {
    if (k < 1 || k > num_controls()) {
        throw InputError("stratified sampling: k = " + std::to_string(k) + " outside [1, " +
                         std::to_string(num_controls()) + "]");
    }
    if (quota_total() > k) {
        throw InputError("stratified sampling: quota total " + std::to_string(quota_total()) + " exceeds k = " +
                         std::to_string(k));
    }
    for (std::size_t c = 0; c < categories_.size(); ++c) {
        if (members_[c].size() < quota_[c]) {
            throw InputError("stratified sampling: category '" + categories_[c] + "' has " +
                             std::to_string(members_[c].size()) + " members but quota " + std::to_string(quota_[c]));
        }
    }
}

bool CategoryScheme::satisfied_by(const Subspace& s) const {
    std::vector<std::size_t> counts(categories_.size(), 0);
    for (std::size_t i : s.indices) ++counts[membership_.at(i)];
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] < quota_[c]) return false;
    }
    return true;
}

namespace {

// Moves `take` uniformly chosen elements of pool[from..] to pool[from..from+take).
void partial_shuffle(std::vector<std::size_t>& pool, std::size_t from, std::size_t take, Rng& rng) {
    for (std::size_t i = from; i < from + take; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
}

}  // namespace

Subspace draw_uniform_subspace(std::size_t q, std::size_t k, std::uint64_t seed, std::size_t draw_id) {
    if (k < 1 || k > q) {
        throw InputError("uniform sampling: k = " + std::to_string(k) + " outside [1, q = " + std::to_string(q) + "]");
    }
    Rng rng = make_rng(seed, {stream::subspace, draw_id});
    std::vector<std::size_t> pool(q);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    partial_shuffle(pool, 0, k, rng);
    Subspace s{{pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k)}, draw_id};
    std::sort(s.indices.begin(), s.indices.end());
    return s;
}

std::vector<Subspace> draw_uniform_subspaces(std::size_t q, std::size_t k, std::size_t n_draws, std::uint64_t seed) {
    if (n_draws < 1) throw InputError("uniform sampling: n_R must be at least 1");
    std::vector<Subspace> out;
    out.reserve(n_draws);
    for (std::size_t j = 0; j < n_draws; ++j) out.push_back(draw_uniform_subspace(q, k, seed, j));
    return out;
}

Subspace draw_stratified_subspace(const CategoryScheme& scheme, std::size_t k, std::uint64_t seed,
                                  std::size_t draw_id) {
    scheme.check_feasible(k);
    Rng rng = make_rng(seed, {stream::subspace, draw_id});
    std::vector<char> used(scheme.num_controls(), 0);
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    for (std::size_t c = 0; c < scheme.categories().size(); ++c) {
        const std::size_t m = scheme.quotas()[c];
        if (m == 0) continue;
        std::vector<std::size_t> pool = scheme.members()[c];
        partial_shuffle(pool, 0, m, rng);
        for (std::size_t i = 0; i < m; ++i) {
            chosen.push_back(pool[i]);
            used[pool[i]] = 1;
        }
    }
    std::vector<std::size_t> rest;
    rest.reserve(scheme.num_controls());
    for (std::size_t i = 0; i < scheme.num_controls(); ++i) {
        if (!used[i]) rest.push_back(i);
    }
    const std::size_t fill = k - chosen.size();
    partial_shuffle(rest, 0, fill, rng);
    chosen.insert(chosen.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(fill));
    std::sort(chosen.begin(), chosen.end());
    return Subspace{std::move(chosen), draw_id};
}

std::vector<Subspace> draw_stratified_subspaces(const CategoryScheme& scheme, std::size_t k, std::size_t n_draws,
                                                std::uint64_t seed) {
    if (n_draws < 1) throw InputError("stratified sampling: n_R must be at least 1");
    scheme.check_feasible(k);
    std::vector<Subspace> out;
    out.reserve(n_draws);
    for (std::size_t j = 0; j < n_draws; ++j) out.push_back(draw_stratified_subspace(scheme, k, seed, j));
    return out;
}

}  // namespace erslp
