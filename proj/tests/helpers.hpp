#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "refnav/corpus.hpp"
#include "refnav/params.hpp"
#include "refnav/recsys.hpp"
#include "refnav/rng.hpp"

namespace refnav::test {

// Random corpus of n docs with tokens drawn from a small pool; some docs get
// the probe drug/gene words placed in metadata or body.
inline Corpus random_corpus(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    auto words = [&](std::size_t count) {
        std::string s;
        for (std::size_t i = 0; i < count; ++i) {
            if (i) s += " ";
            s += "tok" + std::to_string(rng.uniform_index(80));
        }
        return s;
    };
    Corpus corpus;
    for (std::size_t i = 0; i < n; ++i) {
        Reference ref;
        ref.id = "r" + std::to_string(i);
        ref.title = words(4);
        ref.abstract_text = words(10);
        if (rng.uniform_real() < 0.3) {
            std::string extra = rng.uniform_real() < 0.5 ? " probedrug" : " probedrug probegene";
            if (rng.uniform_real() < 0.5) ref.title += extra;
            else ref.abstract_text += extra;
        }
        std::string body = words(8) + ".";
        if (rng.uniform_real() < 0.25) body += " probedrug binds probegene.";
        else if (rng.uniform_real() < 0.25) body += " probedrug alone. probegene alone.";
        ref.body = body;
        corpus.add(std::move(ref));
    }
    return corpus;
}

// Central finite differences over every parameter of a store.
// Returns the max relative error against the provided analytic gradients.
inline double max_fd_rel_error(ParamStore& store,
                               const std::map<std::string, Vec>& analytic,
                               const std::function<double()>& forward,
                               double eps = 1e-5) {
    double worst = 0.0;
    for (const auto& [name, grad] : analytic) {
        Vec& theta = store.data(name);
        for (std::size_t i = 0; i < theta.size(); ++i) {
            double saved = theta[i];
            theta[i] = saved + eps;
            double up = forward();
            theta[i] = saved - eps;
            double down = forward();
            theta[i] = saved;
            double fd = (up - down) / (2.0 * eps);
            double denom = std::max({1.0, std::fabs(fd), std::fabs(grad[i])});
            worst = std::max(worst, std::fabs(fd - grad[i]) / denom);
        }
    }
    return worst;
}

}  // namespace refnav::test
