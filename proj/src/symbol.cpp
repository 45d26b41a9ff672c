#include "legweb/symbol.hpp"

#include <stdexcept>

namespace legweb::sym {

SymbolRegistry& SymbolRegistry::instance() {
    static SymbolRegistry reg;
    return reg;
}

SymbolId SymbolRegistry::intern(const std::string& name, int weight, Origin origin) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = by_name_.find(name);
    if (it != by_name_.end()) {
        SymbolInfo& info = infos_[it->second];
        if (weight != kWeightUnset) {
            if (info.weight == kWeightUnset)
                info.weight = weight;
            else if (info.weight != weight)
                throw std::invalid_argument("symbol '" + name + "' re-registered with weight " +
                                            std::to_string(weight) + " != " +
                                            std::to_string(info.weight));
        }
        return it->second;
    }
    SymbolId id = static_cast<SymbolId>(infos_.size());
    infos_.push_back(SymbolInfo{name, weight, origin});
    by_name_.emplace(name, id);
    return id;
}

std::optional<SymbolId> SymbolRegistry::find(const std::string& name) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

const SymbolInfo& SymbolRegistry::info(SymbolId id) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (id >= infos_.size()) throw std::out_of_range("unknown symbol id");
    return infos_[id];
}

int SymbolRegistry::weight(SymbolId id) const {
    const SymbolInfo& i = info(id);
    if (i.weight == kWeightUnset)
        throw std::logic_error("symbol '" + i.name + "' has no assigned weight");
    return i.weight;
}

bool SymbolRegistry::weight_known(SymbolId id) const { return info(id).weight != kWeightUnset; }

void SymbolRegistry::ensure_weight(SymbolId id, int weight) {
    std::lock_guard<std::mutex> lock(mu_);
    if (id >= infos_.size()) throw std::out_of_range("unknown symbol id");
    SymbolInfo& info = infos_[id];
    if (info.weight == kWeightUnset) {
        info.weight = weight;
    } else if (info.weight != weight) {
        throw std::invalid_argument("weight of '" + info.name + "' already " +
                                    std::to_string(info.weight) + ", cannot set " +
                                    std::to_string(weight));
    }
}

SymbolId SymbolRegistry::derivative(SymbolId base, int direction, Origin origin) {
    if (direction != 0 && direction != 1 && direction != 2)
        throw std::invalid_argument("derivative direction must be 1, 2 or 0");
    const int shift = (direction == 0) ? 2 : 1; // theta carries weight 2, omegas weight 1
    SymbolInfo b = info(base);
    std::string name = b.name + "_" + std::to_string(direction);
    int w = (b.weight == kWeightUnset) ? kWeightUnset : b.weight + shift;
    return intern(name, w, origin);
}

std::size_t SymbolRegistry::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return infos_.size();
}

} // namespace legweb::sym
