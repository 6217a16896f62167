#include "nn2poly/combinatorics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "nn2poly/errors.hpp"

namespace nn2poly {

Multiset::Multiset(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end());
    for (const auto& e : entries) {
        if (e.multiplicity < 1) throw std::invalid_argument("multiset multiplicities must be positive");
        if (!entries_.empty() && entries_.back().element == e.element)
            entries_.back().multiplicity += e.multiplicity;
        else
            entries_.push_back(e);
    }
}

Multiset Multiset::from_elements(const std::vector<int>& elements) {
    std::vector<Entry> entries;
    entries.reserve(elements.size());
    for (int e : elements) entries.push_back({e, 1});
    return Multiset(std::move(entries));
}

int Multiset::size() const noexcept {
    int total = 0;
    for (const auto& e : entries_) total += e.multiplicity;
    return total;
}

std::vector<int> Multiset::elements() const {
    std::vector<int> out;
    for (const auto& e : entries_) out.insert(out.end(), static_cast<std::size_t>(e.multiplicity), e.element);
    return out;
}

Multiset multiset_from_label(const Monomial& m) {
    if (m.is_intercept()) throw ValidationError("the intercept label has no multiset");
    return Multiset::from_elements(m.indices());
}

Signature signature_of(const Multiset& ms) {
    Signature sig;
    sig.reserve(ms.distinct());
    for (const auto& e : ms.entries()) sig.push_back(e.multiplicity);
    std::sort(sig.begin(), sig.end(), std::greater<>());
    return sig;
}

namespace {

// Counts partitions, appending them to `out` when given. Stops early and
// returns limit + 1 once the count passes `limit`.
std::size_t visit_partitions(const Multiset& ms, std::size_t limit, std::vector<MultisetPartition>* out) {
    // Knuth, TAOCP Vol. 4A, 7.2.1.5 Algorithm M. Components c, remaining
    // multiplicities u and part multiplicities v live in stacked frames;
    // f[i] is the first component slot of part i.
    std::size_t count = 0;
    const auto& entries = ms.entries();
    const std::size_t m = entries.size();
    const int n = ms.size();
    if (n == 0) return 0;

    const std::size_t cap = m * static_cast<std::size_t>(n) + 1;
    std::vector<std::size_t> c(cap);
    std::vector<int> u(cap), v(cap);
    std::vector<std::size_t> f(static_cast<std::size_t>(n) + 2);

    // M1
    for (std::size_t j = 0; j < m; ++j) {
        c[j] = j;
        u[j] = v[j] = entries[j].multiplicity;
    }
    std::size_t a = 0, b = m, l = 0;
    f[0] = 0;
    f[1] = m;

    for (;;) {
        // M2: subtract v from u to form the next part.
        for (;;) {
            std::size_t j = a, k = b;
            bool x = false;
            while (j < b) {
                u[k] = u[j] - v[j];
                if (u[k] == 0) {
                    x = true;
                } else if (!x) {
                    c[k] = c[j];
                    v[k] = std::min(v[j], u[k]);
                    x = u[k] < v[j];
                    ++k;
                } else {
                    c[k] = c[j];
                    v[k] = u[k];
                    ++k;
                }
                ++j;
            }
            // M3: push if nonzero.
            if (k > b) {
                a = b;
                b = k;
                ++l;
                f[l + 1] = b;
            } else {
                break;
            }
        }

        // M4: visit.
        if (++count > limit) return count;
        if (out) {
            MultisetPartition part;
            part.blocks.reserve(l + 1);
            for (std::size_t i = 0; i <= l; ++i) {
                std::vector<Multiset::Entry> block;
                for (std::size_t j = f[i]; j < f[i + 1]; ++j)
                    if (v[j] > 0) block.push_back({entries[c[j]].element, v[j]});
                part.blocks.emplace_back(std::move(block));
            }
            out->push_back(std::move(part));
        }

        // M5/M6: decrease v, backtracking as needed.
        for (;;) {
            std::size_t j = b - 1;
            while (v[j] == 0) --j;
            if (j == a && v[j] == 1) {
                // M6
                if (l == 0) return count;
                --l;
                b = a;
                a = f[l];
                continue;
            }
            --v[j];
            for (std::size_t k = j + 1; k < b; ++k) v[k] = u[k];
            break;
        }
    }
}

}  // namespace

std::vector<MultisetPartition> enumerate_partitions(const Multiset& ms) {
    std::vector<MultisetPartition> out;
    visit_partitions(ms, std::numeric_limits<std::size_t>::max(), &out);
    return out;
}

std::string to_string(const MultisetPartition& part) {
    std::ostringstream os;
    for (std::size_t i = 0; i < part.blocks.size(); ++i) {
        if (i) os << '|';
        auto el = part.blocks[i].elements();
        for (std::size_t k = 0; k < el.size(); ++k) {
            if (k) os << ',';
            os << el[k];
        }
    }
    return os.str();
}

namespace {

// Integer partitions of `total` into at most `max_parts` parts, each part
// <= `largest`, emitted in non-increasing order.
void integer_partitions(int total, int largest, std::size_t max_parts, Signature& current,
                        std::vector<Signature>& out) {
    if (total == 0) {
        out.push_back(current);
        return;
    }
    if (current.size() == max_parts) return;
    for (int part = std::min(total, largest); part >= 1; --part) {
        current.push_back(part);
        integer_partitions(total - part, part, max_parts, current, out);
        current.pop_back();
    }
}

Multiset canonical_representative(const Signature& sig) {
    std::vector<Multiset::Entry> entries;
    for (std::size_t k = 0; k < sig.size(); ++k) entries.push_back({static_cast<int>(k) + 1, sig[k]});
    return Multiset(std::move(entries));
}

}  // namespace

PartitionCache PartitionCache::build(int p, int max_order, std::size_t ceiling) {
    if (p < 1) throw ValidationError("partition cache needs p >= 1");
    if (max_order < 1) throw ValidationError("partition cache needs max_order >= 1");
    PartitionCache cache;
    cache.p_ = p;
    cache.max_order_ = max_order;
    std::vector<Signature> sigs;
    Signature current;
    for (int total = 1; total <= max_order; ++total)
        integer_partitions(total, total, static_cast<std::size_t>(p), current, sigs);
    // Count first so an oversized request fails before allocating anything.
    for (const auto& sig : sigs) {
        cache.total_ += visit_partitions(canonical_representative(sig), ceiling - cache.total_, nullptr);
        if (cache.total_ > ceiling)
            throw ResourceError("partition cache exceeds the ceiling of " + std::to_string(ceiling) +
                                " partitions; lower the maximum order");
    }
    for (const auto& sig : sigs) {
        std::vector<MultisetPartition> parts;
        visit_partitions(canonical_representative(sig), ceiling, &parts);
        cache.entries_.emplace(sig, std::move(parts));
    }
    return cache;
}

const std::vector<MultisetPartition>& PartitionCache::at(const Signature& sig) const {
    auto it = entries_.find(sig);
    if (it == entries_.end()) throw std::out_of_range("signature missing from partition cache");
    return it->second;
}

std::vector<Signature> PartitionCache::signatures() const {
    std::vector<Signature> out;
    out.reserve(entries_.size());
    for (const auto& [sig, parts] : entries_) out.push_back(sig);
    return out;
}

std::vector<MultisetPartition> partitions_for_label(const PartitionCache& cache, const Monomial& m) {
    const Multiset ms = multiset_from_label(m);
    auto entries = ms.entries();
    std::stable_sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
        return x.multiplicity > y.multiplicity;
    });
    // canonical element k+1 -> entries[k].element
    const auto& canonical = cache.at(signature_of(ms));
    std::vector<MultisetPartition> out;
    out.reserve(canonical.size());
    for (const auto& part : canonical) {
        MultisetPartition mapped;
        mapped.blocks.reserve(part.blocks.size());
        for (const auto& block : part.blocks) {
            std::vector<Multiset::Entry> be;
            for (const auto& e : block.entries())
                be.push_back({entries[static_cast<std::size_t>(e.element - 1)].element, e.multiplicity});
            mapped.blocks.emplace_back(std::move(be));
        }
        out.push_back(std::move(mapped));
    }
    return out;
}

}  // namespace nn2poly
