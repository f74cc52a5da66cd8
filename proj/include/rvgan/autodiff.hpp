#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "rvgan/tensor.hpp"

namespace rvgan::ad {

class Node;
using Value = std::shared_ptr<Node>;

// One vertex of a dynamically built computation graph. Graphs are rebuilt
// each forward pass; parameters are leaf nodes that outlive the graph.
class Node {
public:
    Tensor value;
    Tensor grad;  // allocated on first accumulate
    bool requires_grad = false;
    std::vector<Value> parents;
    // Reads this node's grad/value and accumulates into the parents.
    std::function<void(Node&)> backward_fn;

    const TensorSpec& shape() const { return value.shape(); }

    // Scalar convenience for loss nodes (numel must be 1).
    real scalar() const;

    void accumulate_grad(const Tensor& g);
    void zero_grad() { grad = Tensor(); }
    bool has_grad() const { return !grad.empty(); }
};

// When grad mode is off, ops produce constant nodes with no parents, so
// inference retains no graph.
bool grad_enabled();
void set_grad_enabled(bool on);

struct NoGradGuard {
    NoGradGuard() : prev_(grad_enabled()) { set_grad_enabled(false); }
    ~NoGradGuard() { set_grad_enabled(prev_); }
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool prev_;
};

Value constant(Tensor t);
Value parameter(Tensor t);  // leaf with requires_grad
Value make_op(Tensor out, std::vector<Value> parents, std::function<void(Node&)> backward);

// Detach: constant node sharing the same values.
Value detach(const Value& v);

// Reverse-mode sweep from a scalar root. Seeds d(root)/d(root) = 1 and
// accumulates into every reachable node with requires_grad.
void backward(const Value& root);

}  // namespace rvgan::ad
