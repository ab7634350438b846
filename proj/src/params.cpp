#include "refnav/params.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace refnav {

namespace {

std::size_t shape_size(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    return n;
}

}  // namespace

void ParamStore::add_uniform(const std::string& name, std::vector<std::size_t> shape,
                             Rng& rng, double scale) {
    Vec data(shape_size(shape));
    for (auto& x : data) x = rng.uniform(-scale, scale);
    add_raw(name, std::move(shape), std::move(data));
}

void ParamStore::add_zeros(const std::string& name, std::vector<std::size_t> shape) {
    Vec data(shape_size(shape), 0.0);
    add_raw(name, std::move(shape), std::move(data));
}

void ParamStore::add_raw(const std::string& name, std::vector<std::size_t> shape, Vec data) {
    if (entries_.count(name))
        throw std::invalid_argument("param store: duplicate parameter '" + name + "'");
    if (data.size() != shape_size(shape))
        throw std::invalid_argument("param store: shape/data mismatch for '" + name + "'");
    entries_[name] = Entry{std::move(shape), std::move(data)};
}

ParamStore::Entry& ParamStore::entry(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end())
        throw std::out_of_range("param store: unknown parameter '" + name + "'");
    return it->second;
}

const ParamStore::Entry& ParamStore::entry(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end())
        throw std::out_of_range("param store: unknown parameter '" + name + "'");
    return it->second;
}

void save_params(const ParamStore& store, const nlohmann::ordered_json& meta,
                 const std::string& path) {
    nlohmann::ordered_json j;
    j["format"] = "refnav-checkpoint-1";
    j["meta"] = meta;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [name, entry] : store.entries()) {
        nlohmann::ordered_json p;
        p["shape"] = entry.shape;
        p["data"] = entry.data;
        params[name] = std::move(p);
    }
    j["params"] = std::move(params);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << j.dump() << "\n";
}

ParamStore load_params(const std::string& path, nlohmann::json* meta) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    nlohmann::json j;
    in >> j;
    if (j.value("format", std::string()) != "refnav-checkpoint-1")
        throw std::runtime_error("unrecognized checkpoint format in " + path);
    if (meta) *meta = j.value("meta", nlohmann::json::object());
    ParamStore store;
    for (const auto& [name, p] : j.at("params").items()) {
        store.add_raw(name, p.at("shape").get<std::vector<std::size_t>>(),
                      p.at("data").get<Vec>());
    }
    return store;
}

void Adam::step(ParamStore& store, const std::map<std::string, Vec>& grads) {
    ++t_;
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    for (const auto& [name, grad] : grads) {
        Vec& theta = store.data(name);
        if (grad.size() != theta.size())
            throw std::invalid_argument("adam: gradient size mismatch for '" + name + "'");
        auto& [m, v] = state_[name];
        if (m.empty()) {
            m.assign(theta.size(), 0.0);
            v.assign(theta.size(), 0.0);
        }
        for (std::size_t i = 0; i < theta.size(); ++i) {
            double g = grad[i];
            if (!std::isfinite(g))
                throw std::runtime_error("adam: non-finite gradient in '" + name + "'");
            m[i] = beta1 * m[i] + (1.0 - beta1) * g;
            v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
            theta[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
        }
    }
}

}  // namespace refnav
