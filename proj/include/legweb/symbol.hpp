#pragma once

#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace legweb::sym {

using SymbolId = std::uint32_t;

enum class Origin { Invariant, FreshDerivative, Deformation };

// Sentinel for a symbol whose scaling weight has not been resolved yet.
inline constexpr int kWeightUnset = INT32_MIN;

struct SymbolInfo {
    std::string name;
    int weight = kWeightUnset;
    Origin origin = Origin::Invariant;
};

// Process-wide append-only registry. Registration is synchronized; ids are
// stable, lookups after setup race-free because entries are never removed.
class SymbolRegistry {
  public:
    static SymbolRegistry& instance();

    // Idempotent. Re-interning with a conflicting weight is an error.
    SymbolId intern(const std::string& name, int weight = kWeightUnset,
                    Origin origin = Origin::Invariant);

    std::optional<SymbolId> find(const std::string& name) const;

    const SymbolInfo& info(SymbolId id) const;
    const std::string& name(SymbolId id) const { return info(id).name; }
    int weight(SymbolId id) const;
    bool weight_known(SymbolId id) const;

    // Sets the weight of a symbol whose weight is still unset.
    void ensure_weight(SymbolId id, int weight);

    // Derivative symbol in coframe direction 1, 2 or 0 (theta). Name gets the
    // index appended ("A0" -> "A0_1"); weight shifts by the coframe weight.
    SymbolId derivative(SymbolId base, int direction, Origin origin);

    std::size_t size() const;

  private:
    SymbolRegistry() = default;
    mutable std::mutex mu_;
    std::deque<SymbolInfo> infos_;
    std::unordered_map<std::string, SymbolId> by_name_;
};

inline SymbolId intern(const std::string& name, int weight = kWeightUnset,
                       Origin origin = Origin::Invariant) {
    return SymbolRegistry::instance().intern(name, weight, origin);
}

inline const std::string& symbol_name(SymbolId id) {
    return SymbolRegistry::instance().name(id);
}

} // namespace legweb::sym
