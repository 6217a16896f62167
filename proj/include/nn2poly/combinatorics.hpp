#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nn2poly/polynomial.hpp"

namespace nn2poly {

/// Sorted (element, multiplicity) pairs; elements strictly increasing.
class Multiset {
public:
    struct Entry {
        int element;
        int multiplicity;
        friend bool operator==(const Entry&, const Entry&) = default;
        friend auto operator<=>(const Entry&, const Entry&) = default;
    };

    Multiset() = default;
    /// Accepts entries in any order; merges repeated elements.
    explicit Multiset(std::vector<Entry> entries);
    /// Builds from a flat list of elements with repetition.
    static Multiset from_elements(const std::vector<int>& elements);

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    std::size_t distinct() const noexcept { return entries_.size(); }
    int size() const noexcept;
    std::vector<int> elements() const;

    friend bool operator==(const Multiset&, const Multiset&) = default;
    friend auto operator<=>(const Multiset&, const Multiset&) = default;

private:
    std::vector<Entry> entries_;
};

/// Blocks whose multiset union is the partitioned multiset.
struct MultisetPartition {
    std::vector<Multiset> blocks;
    friend bool operator==(const MultisetPartition&, const MultisetPartition&) = default;
};

/// Multiplicities sorted descending: the equivalence key for partitions.
using Signature = std::vector<int>;

Multiset multiset_from_label(const Monomial& m);
Signature signature_of(const Multiset& ms);

/// Every distinct partition of `ms`, each exactly once. Order follows
/// Knuth's multipartition enumeration (TAOCP 7.2.1.5, Algorithm M):
/// decreasing lexicographic, the whole multiset as a single block first.
std::vector<MultisetPartition> enumerate_partitions(const Multiset& ms);

/// `1,1|2` style dump: blocks separated by `|`, elements by `,`.
std::string to_string(const MultisetPartition& part);

/// Partition lists of one canonical representative per signature.
/// The representative of signature (m1 >= m2 >= ... >= md) is the multiset
/// {1 x m1, 2 x m2, ..., d x md}.
class PartitionCache {
public:
    static constexpr std::size_t default_ceiling = 10'000'000;

    /// Eagerly enumerates every signature reachable by a monomial of order
    /// 1..max_order in p variables. Throws ResourceError once the running
    /// total of partitions passes `ceiling`.
    static PartitionCache build(int p, int max_order, std::size_t ceiling = default_ceiling);

    bool contains(const Signature& sig) const { return entries_.contains(sig); }
    /// Throws std::out_of_range when `sig` was not built.
    const std::vector<MultisetPartition>& at(const Signature& sig) const;

    std::vector<Signature> signatures() const;
    std::size_t total_partitions() const noexcept { return total_; }
    int p() const noexcept { return p_; }
    int max_order() const noexcept { return max_order_; }

private:
    std::map<Signature, std::vector<MultisetPartition>> entries_;
    std::size_t total_ = 0;
    int p_ = 0;
    int max_order_ = 0;
};

/// Partitions of `m`'s multiset, taken from the cache and relabeled onto
/// m's variables. Canonical element k is mapped to the k-th variable when
/// variables are ordered by descending multiplicity, ties by ascending index.
std::vector<MultisetPartition> partitions_for_label(const PartitionCache& cache, const Monomial& m);

}  // namespace nn2poly
