#include "neglectnet/tensor.hpp"

#include <unordered_set>

namespace neglectnet::inline NEGLECTNET_PRECISION {
namespace {

thread_local bool g_grad_mode = true;

}  // namespace

bool grad_mode_enabled() { return g_grad_mode; }

NoGradGuard::NoGradGuard() : previous_(g_grad_mode) { g_grad_mode = false; }
NoGradGuard::~NoGradGuard() { g_grad_mode = previous_; }

Tensor Tensor::zeros(const Shape& shape, bool requires_grad) { return full(shape, Real(0), requires_grad); }

Tensor Tensor::full(const Shape& shape, Real value, bool requires_grad)
{
    for (auto e : shape)
        if (e <= 0) throw DimensionError("tensor extents must be positive, got " + shape_to_string(shape));
    auto impl = std::make_shared<TensorImpl>();
    impl->shape = shape;
    impl->data.assign(static_cast<size_t>(shape_numel(shape)), value);
    impl->requires_grad = requires_grad;
    return Tensor(std::move(impl));
}

Tensor Tensor::from_data(const Shape& shape, std::vector<Real> data, bool requires_grad)
{
    for (auto e : shape)
        if (e <= 0) throw DimensionError("tensor extents must be positive, got " + shape_to_string(shape));
    if (shape_numel(shape) != static_cast<int64_t>(data.size()))
        throw DimensionError("data length " + std::to_string(data.size()) + " does not match shape " +
                             shape_to_string(shape));
    auto impl = std::make_shared<TensorImpl>();
    impl->shape = shape;
    impl->data = std::move(data);
    impl->requires_grad = requires_grad;
    return Tensor(std::move(impl));
}

Tensor Tensor::scalar(Real value, bool requires_grad) { return full({1}, value, requires_grad); }

Real Tensor::item() const
{
    if (numel() != 1) throw DimensionError("item() on tensor of shape " + shape_to_string(shape()));
    return impl_->data[0];
}

std::span<Real> Tensor::mutable_grad() { return detail::grad_buffer(*this); }

Tensor Tensor::detach() const
{
    auto impl = std::make_shared<TensorImpl>();
    impl->shape = impl_->shape;
    impl->data = impl_->data;
    return Tensor(std::move(impl));
}

Tensor Tensor::clone() const
{
    Tensor t = detach();
    t.set_requires_grad(requires_grad());
    return t;
}

void Tensor::backward() const
{
    if (numel() != 1) throw DimensionError("backward() needs a single-element tensor, got " + shape_to_string(shape()));
    if (!requires_grad()) throw ArgumentError("backward() on a tensor that does not require grad");

    // Post-order DFS gives a topological order (inputs before outputs).
    std::vector<TensorImpl*> order;
    std::unordered_set<const TensorImpl*> visited;
    std::vector<std::pair<TensorImpl*, size_t>> stack;
    stack.emplace_back(impl_.get(), 0);
    visited.insert(impl_.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        const auto& fn = node->grad_fn;
        if (fn && next < fn->inputs.size()) {
            TensorImpl* child = &fn->inputs[next++].impl();
            if (child->requires_grad && visited.insert(child).second) stack.emplace_back(child, 0);
            continue;
        }
        order.push_back(node);
        stack.pop_back();
    }

    for (TensorImpl* t : order)
        if (t->grad.empty()) t->grad.assign(t->data.size(), Real(0));
    impl_->grad[0] += Real(1);

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const TensorImpl& t = **it;
        if (t.grad_fn) t.grad_fn->backward(t);
    }
}

namespace detail {

Tensor make_result(const char* name, Shape shape, std::vector<Real> data, std::vector<Tensor> inputs,
                   std::function<void(const TensorImpl& out)> backward)
{
    Tensor out = Tensor::from_data(shape, std::move(data));
    if (!g_grad_mode) return out;
    bool any = false;
    for (const auto& in : inputs) any = any || in.requires_grad();
    if (!any) return out;
    auto node = std::make_shared<Node>();
    node->name = name;
    node->inputs = std::move(inputs);
    node->backward = std::move(backward);
    out.impl().grad_fn = std::move(node);
    out.set_requires_grad(true);
    return out;
}

std::vector<Real>& grad_buffer(const Tensor& t)
{
    auto& g = t.impl().grad;
    if (g.empty()) g.assign(t.impl().data.size(), Real(0));
    return g;
}

}  // namespace detail
}  // namespace neglectnet
