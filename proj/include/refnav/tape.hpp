#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "refnav/params.hpp"

namespace refnav {

// Reverse-mode tape covering exactly the operations the model graphs need.
// Parameters are read directly from a ParamStore; backward() accumulates
// their gradients into param_grads(), keyed by parameter name.
class Tape {
  public:
    explicit Tape(const ParamStore* store = nullptr) : store_(store) {}

    int input(Vec v);

    // mean / concatenation of embedding-table rows; empty row list -> zeros
    int embed_mean(const std::string& table, const std::vector<int>& rows, std::size_t dim);
    int embed_concat(const std::string& table, const std::vector<int>& rows, std::size_t dim);

    int matvec(const std::string& w, int x);                       // W (out x in) row-major
    int affine(const std::string& w, const std::string& b, int x); // W x + b

    int concat(int a, int b);
    int add_param_vec(int x, const std::string& b);  // x + parameter vector b
    int add(int a, int b);
    int sub(int a, int b);
    int mul(int a, int b);             // elementwise
    int scale(int a, double c);
    int add_const(int a, double c);
    int tanh_op(int x);
    int sigmoid_op(int x);
    int relu_op(int x);
    int abs_op(int x);
    int dot(int a, int b);             // scalar
    int sum(int x);                    // scalar
    int stack(const std::vector<int>& scalars);
    int mul_const_vec(int x, const Vec& w);
    int max_over(const std::vector<int>& xs);  // elementwise max across nodes

    int log_prob(int logits, std::size_t index);  // log softmax(logits)[index]
    int entropy_of_logits(int logits);
    int bce_with_logit(int logit, double label);  // scalar logit, stable BCE

    const Vec& value(int id) const { return nodes_[id].val; }
    double scalar(int id) const;
    Vec softmax_value(int logits) const;  // read-only helper, not a node

    void backward(int loss);
    const std::map<std::string, Vec>& param_grads() const { return grads_; }

    std::size_t node_count() const { return nodes_.size(); }

  private:
    struct Node {
        Vec val;
        Vec grad;
        std::function<void(Tape&)> back;
    };

    int push(Vec val, std::function<void(Tape&)> back);
    Vec& grad(int id);
    Vec& pgrad(const std::string& name);
    const ParamStore::Entry& param(const std::string& name) const;

    std::vector<Node> nodes_;
    const ParamStore* store_;
    std::map<std::string, Vec> grads_;
    bool ran_backward_ = false;
    int last_id_ = -1;  // id of the node whose backward closure is running
};

Vec softmax(const Vec& logits);

}  // namespace refnav
