#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "blockrip/matrix.hpp"

namespace blockrip {

// Disjoint index sets covering [0, D). Indices within a group need not be
// consecutive.
struct GroupPartition {
    std::vector<std::vector<std::size_t>> groups;
    std::size_t dimension = 0;  // D

    std::size_t num_groups() const { return groups.size(); }
    std::size_t group_size(std::size_t i) const { return groups[i].size(); }
    std::size_t max_group_size() const;

    // Throws ValidationError with messages of the form
    // "partition: overlap at index k" / "partition: missing index k"
    // (k reported 1-based, matching the config format).
    void validate() const;

    static GroupPartition singletons(std::size_t D);
    static GroupPartition contiguous(std::size_t D, std::size_t group_size);
};

struct GroupSparseVector {
    std::vector<double> data;
    std::vector<std::size_t> active_groups;
};

// ||x_{S_i}||_2 of one group.
double group_norm(std::span<const double> x, const GroupPartition& partition, std::size_t i);

// (sum_i ||x_{S_i}||_2^p)^{1/p}; p = infinity gives the max group norm.
double mixed_norm(std::span<const double> x, const GroupPartition& partition, double p);

// Number of groups with ||x_{S_i}||_2 > zero_tol.
std::size_t group_l0(std::span<const double> x, const GroupPartition& partition,
                     double zero_tol = 1e-12);

// Keeps the s groups of largest l2 norm (ties to the smallest group index);
// the error is the l_{S,1} norm of what was dropped, which is exactly the
// optimal s-term group approximation error.
std::pair<GroupSparseVector, double> best_group_approx(std::span<const double> x,
                                                       const GroupPartition& partition,
                                                       std::size_t s);

// min{ sqrt(d) * max_i ||psi_i||_{S,inf}, 1 } over the rows psi_i of Psi.
double coherence_mu(const OrthogonalBasis& psi, const GroupPartition& partition, std::size_t d);

// Enumerates every support of size 1..s over [0, G), size-major and
// lexicographic within each size. Construction throws CapacityError when
// the total count exceeds 1e6.
class GroupSupportEnumerator {
public:
    GroupSupportEnumerator(std::size_t num_groups, std::size_t s);

    // Writes the next support into out; false once exhausted.
    bool next(std::vector<std::size_t>& out);

    static std::uint64_t count(std::size_t num_groups, std::size_t s);
    std::uint64_t total() const { return total_; }

private:
    std::size_t G_;
    std::size_t s_;
    std::size_t current_size_;
    std::vector<std::size_t> current_;
    bool fresh_size_ = true;
    std::uint64_t total_ = 0;
};

}  // namespace blockrip
