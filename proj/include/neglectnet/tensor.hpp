#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "neglectnet/common.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {

class Tensor;
struct TensorImpl;

/// One recorded operation. The backward rule reads the gradient of the
/// operation's output and accumulates into the gradients of its inputs.
struct Node {
    std::string name;
    std::vector<Tensor> inputs;
    std::function<void(const TensorImpl& out)> backward;
};

struct TensorImpl {
    Shape shape;
    std::vector<Real> data;
    std::vector<Real> grad;  // empty until a gradient is accumulated
    bool requires_grad = false;
    std::shared_ptr<Node> grad_fn;
};

/// Shared handle to a dense row-major tensor. Copies alias the same storage.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::shared_ptr<TensorImpl> impl) : impl_(std::move(impl)) {}

    static Tensor zeros(const Shape& shape, bool requires_grad = false);
    static Tensor full(const Shape& shape, Real value, bool requires_grad = false);
    static Tensor from_data(const Shape& shape, std::vector<Real> data, bool requires_grad = false);
    static Tensor scalar(Real value, bool requires_grad = false);

    bool defined() const noexcept { return impl_ != nullptr; }
    const Shape& shape() const { return impl_->shape; }
    int64_t dim(size_t i) const { return impl_->shape.at(i); }
    size_t rank() const { return impl_->shape.size(); }
    int64_t numel() const { return static_cast<int64_t>(impl_->data.size()); }

    std::span<const Real> data() const { return impl_->data; }
    /// Mutable access is for parameter updates and test fixtures only.
    std::span<Real> mutable_data() { return impl_->data; }
    Real item() const;
    Real operator[](int64_t i) const { return impl_->data[static_cast<size_t>(i)]; }

    bool requires_grad() const { return impl_->requires_grad; }
    void set_requires_grad(bool on) { impl_->requires_grad = on; }
    bool has_grad() const { return !impl_->grad.empty(); }
    std::span<const Real> grad() const { return impl_->grad; }
    std::span<Real> mutable_grad();
    void zero_grad() { impl_->grad.clear(); }

    bool is_leaf() const { return impl_->grad_fn == nullptr; }
    const std::shared_ptr<Node>& grad_fn() const { return impl_->grad_fn; }

    /// Reverse-mode sweep from a single-element tensor.
    void backward() const;

    /// Same values, no history, no gradient tracking.
    Tensor detach() const;
    Tensor clone() const;

    TensorImpl& impl() const { return *impl_; }
    const TensorImpl* id() const noexcept { return impl_.get(); }

private:
    std::shared_ptr<TensorImpl> impl_;
};

/// Disables graph recording for its lifetime (evaluation, detached passes).
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool previous_;
};

bool grad_mode_enabled();

namespace detail {

/// Creates the output tensor of an op and, when any input tracks gradients
/// and grad mode is on, attaches the backward rule.
Tensor make_result(const char* name, Shape shape, std::vector<Real> data, std::vector<Tensor> inputs,
                   std::function<void(const TensorImpl& out)> backward);

/// Gradient buffer of an input, allocated as zeros on first use.
std::vector<Real>& grad_buffer(const Tensor& t);

}  // namespace detail

}  // namespace neglectnet
