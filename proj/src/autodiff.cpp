#include "rvgan/autodiff.hpp"

#include <unordered_set>

namespace rvgan::ad {

namespace {
thread_local bool g_grad_enabled = true;
}

bool grad_enabled() { return g_grad_enabled; }
void set_grad_enabled(bool on) { g_grad_enabled = on; }

real Node::scalar() const {
    if (value.numel() != 1) {
        throw ShapeError("Node::scalar: tensor has " + std::to_string(value.numel()) + " elements");
    }
    return value[0];
}

void Node::accumulate_grad(const Tensor& g) {
    if (!requires_grad) return;
    if (grad.empty()) {
        grad = Tensor(value.shape());
    }
    grad.add_(g);
}

Value constant(Tensor t) {
    auto n = std::make_shared<Node>();
    n->value = std::move(t);
    return n;
}

Value parameter(Tensor t) {
    auto n = std::make_shared<Node>();
    n->value = std::move(t);
    n->requires_grad = true;
    return n;
}

Value make_op(Tensor out, std::vector<Value> parents, std::function<void(Node&)> backward) {
    auto n = std::make_shared<Node>();
    n->value = std::move(out);
    if (g_grad_enabled) {
        bool needed = false;
        for (const auto& p : parents) needed = needed || p->requires_grad;
        if (needed) {
            n->requires_grad = true;
            n->parents = std::move(parents);
            n->backward_fn = std::move(backward);
        }
    }
    return n;
}

Value detach(const Value& v) {
    return constant(v->value);
}

void backward(const Value& root) {
    if (root->value.numel() != 1) {
        throw ShapeError("backward: root must be a scalar");
    }
    // Iterative post-order DFS; the reversed finish order is a valid
    // topological order for the sweep.
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, size_t>> stack;
    stack.emplace_back(root.get(), 0);
    seen.insert(root.get());
    while (!stack.empty()) {
        auto& [node, idx] = stack.back();
        if (idx < node->parents.size()) {
            Node* p = node->parents[idx].get();
            ++idx;
            if (p->requires_grad && !seen.count(p)) {
                seen.insert(p);
                stack.emplace_back(p, 0);
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    Tensor seed(root->shape());
    seed[0] = 1;
    root->accumulate_grad(seed);

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backward_fn && n->has_grad()) {
            n->backward_fn(*n);
        }
    }
}

}  // namespace rvgan::ad
