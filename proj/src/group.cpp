#include "blockrip/group.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "blockrip/errors.hpp"

namespace blockrip {

std::size_t GroupPartition::max_group_size() const {
    std::size_t g = 0;
    for (const auto& grp : groups) g = std::max(g, grp.size());
    return g;
}

void GroupPartition::validate() const {
    if (dimension == 0) throw ValidationError("partition: dimension must be >= 1");
    if (groups.empty()) throw ValidationError("partition: no groups");
    std::vector<char> seen(dimension, 0);
    for (const auto& grp : groups) {
        if (grp.empty()) throw ValidationError("partition: empty group");
        for (std::size_t idx : grp) {
            if (idx >= dimension)
                throw ValidationError("partition: index out of range at index " +
                                      std::to_string(idx + 1));
            if (seen[idx])
                throw ValidationError("partition: overlap at index " + std::to_string(idx + 1));
            seen[idx] = 1;
        }
    }
    for (std::size_t i = 0; i < dimension; ++i)
        if (!seen[i])
            throw ValidationError("partition: missing index " + std::to_string(i + 1));
}

GroupPartition GroupPartition::singletons(std::size_t D) {
    GroupPartition p;
    p.dimension = D;
    p.groups.resize(D);
    for (std::size_t i = 0; i < D; ++i) p.groups[i] = {i};
    return p;
}

GroupPartition GroupPartition::contiguous(std::size_t D, std::size_t group_size) {
    if (group_size == 0 || D % group_size != 0)
        throw ValidationError("partition: group size must divide D");
    GroupPartition p;
    p.dimension = D;
    for (std::size_t start = 0; start < D; start += group_size) {
        std::vector<std::size_t> g(group_size);
        std::iota(g.begin(), g.end(), start);
        p.groups.push_back(std::move(g));
    }
    return p;
}

double group_norm(std::span<const double> x, const GroupPartition& partition, std::size_t i) {
    double s = 0.0;
    for (std::size_t idx : partition.groups[i]) s += x[idx] * x[idx];
    return std::sqrt(s);
}

double mixed_norm(std::span<const double> x, const GroupPartition& partition, double p) {
    if (x.size() != partition.dimension)
        throw ValidationError("mixed_norm: vector length != partition dimension");
    if (!(p >= 1.0)) throw ValidationError("mixed_norm: p must be >= 1");
    if (std::isinf(p)) {
        double best = 0.0;
        for (std::size_t i = 0; i < partition.num_groups(); ++i)
            best = std::max(best, group_norm(x, partition, i));
        return best;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < partition.num_groups(); ++i)
        s += std::pow(group_norm(x, partition, i), p);
    return std::pow(s, 1.0 / p);
}

std::size_t group_l0(std::span<const double> x, const GroupPartition& partition,
                     double zero_tol) {
    if (zero_tol < 0.0) throw ValidationError("group_l0: zero_tol must be >= 0");
    std::size_t count = 0;
    for (std::size_t i = 0; i < partition.num_groups(); ++i)
        if (group_norm(x, partition, i) > zero_tol) ++count;
    return count;
}

std::pair<GroupSparseVector, double> best_group_approx(std::span<const double> x,
                                                       const GroupPartition& partition,
                                                       std::size_t s) {
    const std::size_t G = partition.num_groups();
    if (s > G) throw ValidationError("best_group_approx: s exceeds number of groups");
    std::vector<double> norms(G);
    for (std::size_t i = 0; i < G; ++i) norms[i] = group_norm(x, partition, i);

    std::vector<std::size_t> order(G);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (norms[a] != norms[b]) return norms[a] > norms[b];
        return a < b;
    });

    GroupSparseVector z;
    z.data.assign(x.begin(), x.end());
    double error = 0.0;
    std::vector<char> keep(G, 0);
    for (std::size_t r = 0; r < s; ++r) keep[order[r]] = 1;
    for (std::size_t i = 0; i < G; ++i) {
        if (keep[i]) {
            z.active_groups.push_back(i);
        } else {
            error += norms[i];
            for (std::size_t idx : partition.groups[i]) z.data[idx] = 0.0;
        }
    }
    std::sort(z.active_groups.begin(), z.active_groups.end());
    return {std::move(z), error};
}

double coherence_mu(const OrthogonalBasis& psi, const GroupPartition& partition, std::size_t d) {
    const DenseMatrix& m = psi.matrix;
    if (m.rows != partition.dimension)
        throw ValidationError("coherence_mu: basis dimension != partition dimension");
    double max_row = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i) {
        std::span<const double> row(m.data.data() + i * m.cols, m.cols);
        max_row = std::max(max_row, mixed_norm(row, partition,
                                               std::numeric_limits<double>::infinity()));
    }
    return std::min(std::sqrt(static_cast<double>(d)) * max_row, 1.0);
}

std::uint64_t GroupSupportEnumerator::count(std::size_t num_groups, std::size_t s) {
    // sum_{k=1..s} C(G, k), saturating well above the capacity guard.
    constexpr std::uint64_t kCap = std::uint64_t(1) << 62;
    std::uint64_t total = 0;
    long double binom = 1.0L;
    for (std::size_t k = 1; k <= s && k <= num_groups; ++k) {
        binom = binom * static_cast<long double>(num_groups - k + 1) / static_cast<long double>(k);
        if (binom > static_cast<long double>(kCap)) return kCap;
        total += static_cast<std::uint64_t>(binom + 0.5L);
        if (total > kCap) return kCap;
    }
    return total;
}

GroupSupportEnumerator::GroupSupportEnumerator(std::size_t num_groups, std::size_t s)
    : G_(num_groups), s_(std::min(s, num_groups)), current_size_(1) {
    if (num_groups == 0) throw ValidationError("support enumerator: no groups");
    if (s == 0) s_ = 0;
    total_ = count(num_groups, s_);
    if (total_ > 1000000ULL)
        throw CapacityError("support enumeration: " + std::to_string(total_) +
                            " supports exceeds the 1e6 guard; use Monte Carlo mode");
}

bool GroupSupportEnumerator::next(std::vector<std::size_t>& out) {
    while (current_size_ <= s_) {
        if (fresh_size_) {
            current_.resize(current_size_);
            std::iota(current_.begin(), current_.end(), 0);
            fresh_size_ = false;
            out = current_;
            return true;
        }
        // Advance the lexicographic combination of size current_size_.
        std::size_t k = current_size_;
        std::size_t i = k;
        while (i > 0) {
            --i;
            if (current_[i] < G_ - (k - i)) {
                ++current_[i];
                for (std::size_t j = i + 1; j < k; ++j) current_[j] = current_[j - 1] + 1;
                out = current_;
                return true;
            }
        }
        ++current_size_;
        fresh_size_ = true;
    }
    return false;
}

}  // namespace blockrip
