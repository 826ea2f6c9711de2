#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "neglectnet/tensor.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {

/// Ordered collection of named learnable tensors. Insertion order is the
/// canonical order for initialization, optimizers and checkpoints.
class ParamStore {
public:
    const Tensor& add(std::string name, Tensor tensor);

    bool contains(const std::string& name) const { return index_.contains(name); }
    const Tensor& at(const std::string& name) const;
    Tensor& at(const std::string& name);

    const std::vector<std::pair<std::string, Tensor>>& items() const { return items_; }
    size_t size() const { return items_.size(); }
    int64_t parameter_count() const;

    void set_requires_grad(bool on);
    void zero_grad();
    /// True if any tensor holds a non-zero gradient entry.
    bool any_grad() const;

    /// Deep copy; the new store shares no storage with this one.
    ParamStore clone() const;

private:
    std::vector<std::pair<std::string, Tensor>> items_;
    std::unordered_map<std::string, size_t> index_;
};

}  // namespace neglectnet
