#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "refnav/rng.hpp"

namespace refnav {

using Vec = std::vector<double>;

// Named, shaped real-valued parameter arrays with JSON persistence.
class ParamStore {
  public:
    struct Entry {
        std::vector<std::size_t> shape;
        Vec data;  // row-major
    };

    void add_uniform(const std::string& name, std::vector<std::size_t> shape,
                     Rng& rng, double scale = 0.08);
    void add_zeros(const std::string& name, std::vector<std::size_t> shape);
    void add_raw(const std::string& name, std::vector<std::size_t> shape, Vec data);

    bool has(const std::string& name) const { return entries_.count(name) > 0; }
    Entry& entry(const std::string& name);
    const Entry& entry(const std::string& name) const;
    Vec& data(const std::string& name) { return entry(name).data; }
    const Vec& data(const std::string& name) const { return entry(name).data; }

    const std::map<std::string, Entry>& entries() const { return entries_; }
    std::map<std::string, Entry>& entries() { return entries_; }

  private:
    std::map<std::string, Entry> entries_;  // ordered, for stable serialization
};

// Checkpoint: {"format": ..., "meta": {...}, "params": {name: {shape, data}}}
void save_params(const ParamStore& store, const nlohmann::ordered_json& meta,
                 const std::string& path);
ParamStore load_params(const std::string& path, nlohmann::json* meta = nullptr);

struct Adam {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void step(ParamStore& store, const std::map<std::string, Vec>& grads);

  private:
    long long t_ = 0;
    std::map<std::string, std::pair<Vec, Vec>> state_;  // m, v per param
};

}  // namespace refnav
