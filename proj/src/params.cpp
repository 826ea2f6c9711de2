#include "neglectnet/params.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {

const Tensor& ParamStore::add(std::string name, Tensor tensor)
{
    if (contains(name)) throw ArgumentError("duplicate parameter name '" + name + "'");
    index_.emplace(name, items_.size());
    items_.emplace_back(std::move(name), std::move(tensor));
    return items_.back().second;
}

const Tensor& ParamStore::at(const std::string& name) const
{
    auto it = index_.find(name);
    if (it == index_.end()) throw ArgumentError("unknown parameter '" + name + "'");
    return items_[it->second].second;
}

Tensor& ParamStore::at(const std::string& name)
{
    auto it = index_.find(name);
    if (it == index_.end()) throw ArgumentError("unknown parameter '" + name + "'");
    return items_[it->second].second;
}

int64_t ParamStore::parameter_count() const
{
    int64_t n = 0;
    for (const auto& [name, t] : items_) n += t.numel();
    return n;
}

void ParamStore::set_requires_grad(bool on)
{
    for (auto& [name, t] : items_) t.set_requires_grad(on);
}

void ParamStore::zero_grad()
{
    for (auto& [name, t] : items_) t.zero_grad();
}

bool ParamStore::any_grad() const
{
    for (const auto& [name, t] : items_)
        for (Real g : t.grad())
            if (g != Real(0)) return true;
    return false;
}

ParamStore ParamStore::clone() const
{
    ParamStore out;
    for (const auto& [name, t] : items_) out.add(name, t.clone());
    return out;
}

}  // namespace neglectnet
