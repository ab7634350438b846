#include "refnav/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace refnav {

Vec softmax(const Vec& logits) {
    if (logits.empty()) throw std::invalid_argument("softmax: empty logits");
    double mx = *std::max_element(logits.begin(), logits.end());
    Vec p(logits.size());
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        z += p[i];
    }
    for (auto& x : p) x /= z;
    return p;
}

int Tape::push(Vec val, std::function<void(Tape&)> back) {
    nodes_.push_back(Node{std::move(val), {}, std::move(back)});
    return static_cast<int>(nodes_.size()) - 1;
}

Vec& Tape::grad(int id) {
    Node& n = nodes_[id];
    if (n.grad.empty()) n.grad.assign(n.val.size(), 0.0);
    return n.grad;
}

Vec& Tape::pgrad(const std::string& name) {
    Vec& g = grads_[name];
    if (g.empty()) g.assign(param(name).data.size(), 0.0);
    return g;
}

const ParamStore::Entry& Tape::param(const std::string& name) const {
    if (!store_) throw std::logic_error("tape: no parameter store attached");
    return store_->entry(name);
}

int Tape::input(Vec v) { return push(std::move(v), nullptr); }

int Tape::embed_mean(const std::string& table, const std::vector<int>& rows, std::size_t dim) {
    const auto& e = param(table);
    Vec val(dim, 0.0);
    if (!rows.empty()) {
        for (int r : rows)
            for (std::size_t i = 0; i < dim; ++i) val[i] += e.data[r * dim + i];
        for (auto& x : val) x /= static_cast<double>(rows.size());
    }
    int id = push(std::move(val), [table, rows, dim](Tape& t) {
        if (rows.empty()) return;
        int self = t.last_id_;
        Vec& g = t.pgrad(table);
        const Vec& gy = t.grad(self);
        double inv = 1.0 / static_cast<double>(rows.size());
        for (int r : rows)
            for (std::size_t i = 0; i < dim; ++i) g[r * dim + i] += gy[i] * inv;
    });
    return id;
}

int Tape::embed_concat(const std::string& table, const std::vector<int>& rows, std::size_t dim) {
    const auto& e = param(table);
    Vec val(rows.size() * dim);
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (std::size_t i = 0; i < dim; ++i) val[k * dim + i] = e.data[rows[k] * dim + i];
    return push(std::move(val), [table, rows, dim](Tape& t) {
        int self = t.last_id_;
        Vec& g = t.pgrad(table);
        const Vec& gy = t.grad(self);
        for (std::size_t k = 0; k < rows.size(); ++k)
            for (std::size_t i = 0; i < dim; ++i)
                g[rows[k] * dim + i] += gy[k * dim + i];
    });
}

int Tape::matvec(const std::string& w, int x) {
    const auto& e = param(w);
    if (e.shape.size() != 2)
        throw std::invalid_argument("matvec: parameter '" + w + "' is not a matrix");
    std::size_t out_dim = e.shape[0], in_dim = e.shape[1];
    const Vec& xv = nodes_[x].val;
    if (xv.size() != in_dim) throw std::invalid_argument("matvec: dimension mismatch");
    Vec val(out_dim, 0.0);
    for (std::size_t i = 0; i < out_dim; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < in_dim; ++j) acc += e.data[i * in_dim + j] * xv[j];
        val[i] = acc;
    }
    return push(std::move(val), [w, x, out_dim, in_dim](Tape& t) {
        int self = t.last_id_;
        const Vec& gy = t.grad(self);
        const Vec& xv = t.nodes_[x].val;
        const Vec& wd = t.param(w).data;
        Vec& gw = t.pgrad(w);
        Vec& gx = t.grad(x);
        for (std::size_t i = 0; i < out_dim; ++i) {
            double gi = gy[i];
            if (gi == 0.0) continue;
            for (std::size_t j = 0; j < in_dim; ++j) {
                gw[i * in_dim + j] += gi * xv[j];
                gx[j] += gi * wd[i * in_dim + j];
            }
        }
    });
}

int Tape::affine(const std::string& w, const std::string& b, int x) {
    int y = matvec(w, x);
    const auto& be = param(b);
    Vec val = nodes_[y].val;
    for (std::size_t i = 0; i < val.size(); ++i) val[i] += be.data[i];
    return push(std::move(val), [y, b](Tape& t) {
        int self = t.last_id_;
        const Vec& gy = t.grad(self);
        Vec& gx = t.grad(y);
        Vec& gb = t.pgrad(b);
        for (std::size_t i = 0; i < gy.size(); ++i) {
            gx[i] += gy[i];
            gb[i] += gy[i];
        }
    });
}

int Tape::concat(int a, int b) {
    const Vec& av = nodes_[a].val;
    const Vec& bv = nodes_[b].val;
    Vec val;
    val.reserve(av.size() + bv.size());
    val.insert(val.end(), av.begin(), av.end());
    val.insert(val.end(), bv.begin(), bv.end());
    std::size_t na = av.size();
    return push(std::move(val), [a, b, na](Tape& t) {
        int self = t.last_id_;
        const Vec& gy = t.grad(self);
        Vec& ga = t.grad(a);
        Vec& gb = t.grad(b);
        for (std::size_t i = 0; i < na; ++i) ga[i] += gy[i];
        for (std::size_t i = na; i < gy.size(); ++i) gb[i - na] += gy[i];
    });
}

int Tape::add_param_vec(int x, const std::string& b) {
    const auto& be = param(b);
    Vec val = nodes_[x].val;
    if (val.size() != be.data.size())
        throw std::invalid_argument("add_param_vec: dimension mismatch");
    for (std::size_t i = 0; i < val.size(); ++i) val[i] += be.data[i];
    return push(std::move(val), [x, b](Tape& t) {
        int self = t.last_id_;
        const Vec& gy = t.grad(self);
        Vec& gx = t.grad(x);
        Vec& gb = t.pgrad(b);
        for (std::size_t i = 0; i < gy.size(); ++i) {
            gx[i] += gy[i];
            gb[i] += gy[i];
        }
    });
}

int Tape::add(int a, int b) {
    const Vec& av = nodes_[a].val;
    const Vec& bv = nodes_[b].val;
    if (av.size() != bv.size()) throw std::invalid_argument("add: dimension mismatch");
    Vec val(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) val[i] = av[i] + bv[i];
    return push(std::move(val), [a, b](Tape& t) {
        int self = t.last_id_;
        const Vec& gy = t.grad(self);
        Vec& ga = t.grad(a);
        Vec& gb = t.grad(b);
        for (std::size_t i = 0; i < gy.size(); ++i) {
            ga[i] += gy[i];
            gb[i] += gy[i];
        }
    });
}

int Tape::sub(int a, int b) {
    const Vec& av = nodes_[a].val;
    const Vec& bv = nodes_[b].val;
    if (av.size() != bv.size()) throw std::invalid_argument("sub: dimension mismatch");
    Vec val(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) val[i] = av[i] - bv[i];
    return push(std::move(val), [a, b](Tape& t) {
        int self = t.last_id_;
        const Vec& gy = t.grad(self);
        Vec& ga = t.grad(a);
        Vec& gb = t.grad(b);
        for (std::size_t i = 0; i < gy.size(); ++i) {
            ga[i] += gy[i];
            gb[i] -= gy[i];
        }
    });
}

int Tape::mul(int a, int b) {
    const Vec& av = nodes_[a].val;
    const Vec& bv = nodes_[b].val;
    if (av.size() != bv.size()) throw std::invalid_argument("mul: dimension mismatch");
    Vec val(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) val[i] = av[i] * bv[i];
    return push(std::move(val), [a, b](Tape& t) {
        int self = t.last_id_;
        const Vec& gy = t.grad(self);
        const Vec& av = t.nodes_[a].val;
        const Vec& bv = t.nodes_[b].val;
        Vec& ga = t.grad(a);
        Vec& gb = t.grad(b);
        for (std::size_t i = 0; i < gy.size(); ++i) {
            ga[i] += gy[i] * bv[i];
            gb[i] += gy[i] * av[i];
        }
    });
}

int Tape::scale(int a, double c) {
    Vec val = nodes_[a].val;
    for (auto& x : val) x *= c;
    return push(std::move(val), [a, c](Tape& t) {
        int self = t.last_id_;
        const Vec& gy = t.grad(self);
        Vec& ga = t.grad(a);
        for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += c * gy[i];
    });
}

int Tape::add_const(int a, double c) {
    Vec val = nodes_[a].val;
    for (auto& x : val) x += c;
    return push(std::move(val), [a](Tape& t) {
        int self = t.last_id_;
        const Vec& gy = t.grad(self);
        Vec& ga = t.grad(a);
        for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i];
    });
}

int Tape::tanh_op(int x) {
    Vec val = nodes_[x].val;
    for (auto& v : val) v = std::tanh(v);
    return push(std::move(val), [x](Tape& t) {
        int self = t.last_id_;
        const Vec& gy = t.grad(self);
        const Vec& y = t.nodes_[self].val;
        Vec& gx = t.grad(x);
        for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * (1.0 - y[i] * y[i]);
    });
}

int Tape::sigmoid_op(int x) {
    Vec val = nodes_[x].val;
    for (auto& v : val) v = 1.0 / (1.0 + std::exp(-v));
    return push(std::move(val), [x](Tape& t) {
        int self = t.last_id_;
        const Vec& gy = t.grad(self);
        const Vec& y = t.nodes_[self].val;
        Vec& gx = t.grad(x);
        for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * y[i] * (1.0 - y[i]);
    });
}

int Tape::relu_op(int x) {
    Vec val = nodes_[x].val;
    for (auto& v : val) v = v > 0.0 ? v : 0.0;
    return push(std::move(val), [x](Tape& t) {
        int self = t.last_id_;
        const Vec& gy = t.grad(self);
        const Vec& xv = t.nodes_[x].val;
        Vec& gx = t.grad(x);
        for (std::size_t i = 0; i < gy.size(); ++i)
            if (xv[i] > 0.0) gx[i] += gy[i];
    });
}

int Tape::abs_op(int x) {
    Vec val = nodes_[x].val;
    for (auto& v : val) v = std::fabs(v);
    return push(std::move(val), [x](Tape& t) {
        int self = t.last_id_;
        const Vec& gy = t.grad(self);
        const Vec& xv = t.nodes_[x].val;
        Vec& gx = t.grad(x);
        for (std::size_t i = 0; i < gy.size(); ++i)
            gx[i] += xv[i] >= 0.0 ? gy[i] : -gy[i];
    });
}

int Tape::dot(int a, int b) {
    const Vec& av = nodes_[a].val;
    const Vec& bv = nodes_[b].val;
    if (av.size() != bv.size()) throw std::invalid_argument("dot: dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) acc += av[i] * bv[i];
    return push(Vec{acc}, [a, b](Tape& t) {
        int self = t.last_id_;
        double g = t.grad(self)[0];
        const Vec& av = t.nodes_[a].val;
        const Vec& bv = t.nodes_[b].val;
        Vec& ga = t.grad(a);
        Vec& gb = t.grad(b);
        for (std::size_t i = 0; i < av.size(); ++i) {
            ga[i] += g * bv[i];
            gb[i] += g * av[i];
        }
    });
}

int Tape::sum(int x) {
    const Vec& xv = nodes_[x].val;
    double acc = 0.0;
    for (double v : xv) acc += v;
    return push(Vec{acc}, [x](Tape& t) {
        int self = t.last_id_;
        double g = t.grad(self)[0];
        Vec& gx = t.grad(x);
        for (auto& v : gx) v += g;
    });
}

int Tape::stack(const std::vector<int>& scalars) {
    Vec val;
    val.reserve(scalars.size());
    for (int s : scalars) {
        if (nodes_[s].val.size() != 1)
            throw std::invalid_argument("stack: non-scalar element");
        val.push_back(nodes_[s].val[0]);
    }
    return push(std::move(val), [scalars](Tape& t) {
        int self = t.last_id_;
        const Vec& gy = t.grad(self);
        for (std::size_t i = 0; i < scalars.size(); ++i) t.grad(scalars[i])[0] += gy[i];
    });
}

int Tape::mul_const_vec(int x, const Vec& w) {
    const Vec& xv = nodes_[x].val;
    if (xv.size() != w.size()) throw std::invalid_argument("mul_const_vec: size mismatch");
    Vec val(xv.size());
    for (std::size_t i = 0; i < xv.size(); ++i) val[i] = xv[i] * w[i];
    return push(std::move(val), [x, w](Tape& t) {
        int self = t.last_id_;
        const Vec& gy = t.grad(self);
        Vec& gx = t.grad(x);
        for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * w[i];
    });
}

int Tape::max_over(const std::vector<int>& xs) {
    if (xs.empty()) throw std::invalid_argument("max_over: empty list");
    std::size_t n = nodes_[xs[0]].val.size();
    Vec val(n);
    std::vector<std::size_t> argmax(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        double best = nodes_[xs[0]].val[i];
        for (std::size_t k = 1; k < xs.size(); ++k) {
            double v = nodes_[xs[k]].val[i];
            if (v > best) {
                best = v;
                argmax[i] = k;
            }
        }
        val[i] = best;
    }
    return push(std::move(val), [xs, argmax](Tape& t) {
        int self = t.last_id_;
        const Vec& gy = t.grad(self);
        for (std::size_t i = 0; i < gy.size(); ++i)
            t.grad(xs[argmax[i]])[i] += gy[i];
    });
}

int Tape::log_prob(int logits, std::size_t index) {
    Vec p = softmax(nodes_[logits].val);
    if (index >= p.size()) throw std::invalid_argument("log_prob: index out of range");
    double lp = std::log(std::max(p[index], 1e-300));
    return push(Vec{lp}, [logits, index, p](Tape& t) {
        int self = t.last_id_;
        double g = t.grad(self)[0];
        Vec& gl = t.grad(logits);
        for (std::size_t i = 0; i < p.size(); ++i)
            gl[i] += g * ((i == index ? 1.0 : 0.0) - p[i]);
    });
}

int Tape::entropy_of_logits(int logits) {
    Vec p = softmax(nodes_[logits].val);
    double h = 0.0;
    Vec logp(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        logp[i] = std::log(std::max(p[i], 1e-300));
        h -= p[i] * logp[i];
    }
    return push(Vec{h}, [logits, p, logp, h](Tape& t) {
        int self = t.last_id_;
        double g = t.grad(self)[0];
        Vec& gl = t.grad(logits);
        for (std::size_t i = 0; i < p.size(); ++i)
            gl[i] += g * (-p[i] * (logp[i] + h));
    });
}

int Tape::bce_with_logit(int logit, double label) {
    double z = scalar(logit);
    // softplus(z) - label*z, computed without overflow
    double loss = (z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - label * z;
    return push(Vec{loss}, [logit, label](Tape& t) {
        int self = t.last_id_;
        double g = t.grad(self)[0];
        double z = t.nodes_[logit].val[0];
        double s = 1.0 / (1.0 + std::exp(-z));
        t.grad(logit)[0] += g * (s - label);
    });
}

double Tape::scalar(int id) const {
    const Vec& v = nodes_[id].val;
    if (v.size() != 1) throw std::logic_error("tape: node is not a scalar");
    return v[0];
}

Vec Tape::softmax_value(int logits) const { return softmax(nodes_[logits].val); }

void Tape::backward(int loss) {
    if (ran_backward_) throw std::logic_error("tape: backward already ran");
    ran_backward_ = true;
    if (nodes_[loss].val.size() != 1)
        throw std::invalid_argument("backward: loss must be scalar");
    grad(loss)[0] = 1.0;
    for (int i = loss; i >= 0; --i) {
        if (!nodes_[i].back || nodes_[i].grad.empty()) continue;
        last_id_ = i;
        nodes_[i].back(*this);
    }
}

}  // namespace refnav
