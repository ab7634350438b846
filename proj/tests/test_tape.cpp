#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "refnav/tape.hpp"

using namespace refnav;

namespace {

ParamStore small_store(std::uint64_t seed) {
    Rng rng(seed);
    ParamStore store;
    store.add_uniform("table", {6, 3}, rng, 0.5);
    store.add_uniform("w", {3, 3}, rng, 0.5);
    store.add_uniform("w2", {2, 9}, rng, 0.5);
    store.add_uniform("b", {2}, rng, 0.5);
    store.add_uniform("bv", {3}, rng, 0.5);
    return store;
}

}  // namespace

TEST_CASE("softmax normalizes and is shift-invariant") {
    Vec p = softmax({2.0, 2.0});
    CHECK(p[0] == doctest::Approx(0.5));
    Vec q = softmax({1001.0, 1002.0});
    CHECK(q[1] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
    CHECK(q[0] + q[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("composite graph gradient matches finite differences") {
    auto build = [](Tape& t) {
        int m = t.embed_mean("table", {0, 2, 5}, 3);
        int c = t.embed_concat("table", {1, 3}, 3);
        int h = t.tanh_op(t.add_param_vec(t.matvec("w", m), "bv"));
        int g = t.sigmoid_op(h);
        int mixed = t.mul(g, t.relu_op(h));
        int y = t.affine("w2", "b", t.concat(mixed, c));
        int s = t.dot(y, y);
        int e = t.entropy_of_logits(y);
        int lp = t.log_prob(y, 1);
        return t.sum(t.stack({s, t.scale(e, 0.7), t.scale(lp, -0.3),
                              t.abs_op(t.add_const(t.sum(y), -0.2)),
                              t.bce_with_logit(t.sum(mixed), 1.0)}));
    };
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        ParamStore store = small_store(seed);
        Tape tape(&store);
        tape.backward(build(tape));
        double err = test::max_fd_rel_error(store, tape.param_grads(), [&]() {
            Tape t(&store);
            return t.scalar(build(t));
        });
        CHECK(err < 1e-4);
    }
}

TEST_CASE("max_over routes gradient to the argmax input") {
    ParamStore store;
    Rng rng(3);
    store.add_uniform("m", {2, 4}, rng, 1.0);
    auto build = [&](Tape& t) {
        int a = t.embed_concat("m", {0}, 4);
        int b = t.embed_concat("m", {1}, 4);
        return t.sum(t.max_over({a, b}));
    };
    Tape tape(&store);
    int loss = build(tape);
    tape.backward(loss);
    double err = test::max_fd_rel_error(store, tape.param_grads(), [&]() {
        Tape t(&store);
        return t.scalar(build(t));
    });
    CHECK(err < 1e-6);
}

TEST_CASE("backward rejects non-scalar losses and double runs") {
    ParamStore store = small_store(1);
    Tape tape(&store);
    int v = tape.embed_mean("table", {0}, 3);
    CHECK_THROWS_AS(tape.backward(v), std::invalid_argument);
    Tape t2(&store);
    int s = t2.sum(t2.embed_mean("table", {0}, 3));
    t2.backward(s);
    CHECK_THROWS_AS(t2.backward(s), std::logic_error);
}
