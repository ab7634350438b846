#include "refnav/nn.hpp"

#include <stdexcept>

namespace refnav {

PolicyModel PolicyModel::init(const Vocabulary& vocab, int dim, std::uint64_t seed) {
    PolicyModel m;
    m.dim = dim;
    m.vocab_size = vocab.size();
    m.vocab_hash = vocab.hash();
    Rng rng(seed);
    std::size_t d = static_cast<std::size_t>(dim);
    m.params.add_uniform("embed", {m.vocab_size, d}, rng);
    m.params.add_uniform("enc_w", {d, 2 * d}, rng);
    m.params.add_uniform("gru_wz", {d, d}, rng);
    m.params.add_uniform("gru_uz", {d, d}, rng);
    m.params.add_uniform("gru_bz", {d}, rng);
    m.params.add_uniform("gru_w", {d, d}, rng);
    m.params.add_uniform("gru_u", {d, d}, rng);
    m.params.add_uniform("gru_b", {d}, rng);
    m.params.add_uniform("score_w", {d, d}, rng);
    m.params.add_uniform("value_w", {1, d}, rng);
    m.params.add_uniform("value_b", {1}, rng);
    return m;
}

int PolicyModel::encode_reference(Tape& tape, const std::vector<int>& ref_tokens,
                                  const std::vector<int>& query_tokens) const {
    std::size_t d = static_cast<std::size_t>(dim);
    int ref_mean = tape.embed_mean("embed", ref_tokens, d);
    int query_mean = tape.embed_mean("embed", query_tokens, d);
    // concatenate then project; no bias, so an all-zero table encodes to zero
    return tape.matvec("enc_w", tape.concat(ref_mean, query_mean));
}

int PolicyModel::update_observation(Tape& tape, int prev_obs, int feature) const {
    if (tape.value(prev_obs).size() != static_cast<std::size_t>(dim) ||
        tape.value(feature).size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("update_observation: dimension mismatch");
    int z = tape.sigmoid_op(tape.add_param_vec(
        tape.add(tape.matvec("gru_wz", feature), tape.matvec("gru_uz", prev_obs)), "gru_bz"));
    int h = tape.tanh_op(tape.add_param_vec(
        tape.add(tape.matvec("gru_w", feature), tape.matvec("gru_u", prev_obs)), "gru_b"));
    int keep = tape.mul(z, prev_obs);
    int one_minus_z = tape.add_const(tape.scale(z, -1.0), 1.0);
    int take = tape.mul(one_minus_z, h);
    return tape.add(keep, take);
}

int PolicyModel::scored_feature(Tape& tape, int feature) const {
    return tape.matvec("score_w", feature);
}

int PolicyModel::logits_from_scored(Tape& tape, int obs,
                                    const std::vector<int>& scored_features,
                                    const std::optional<Vec>& weights) const {
    if (scored_features.empty())
        throw std::invalid_argument("action_logits: empty candidate list");
    if (weights && weights->size() != scored_features.size())
        throw std::invalid_argument("action_logits: weights length mismatch");
    std::vector<int> logits;
    logits.reserve(scored_features.size());
    for (int sf : scored_features) logits.push_back(tape.dot(obs, sf));
    int stacked = tape.stack(logits);
    if (weights) stacked = tape.mul_const_vec(stacked, *weights);
    return stacked;
}

int PolicyModel::action_logits(Tape& tape, int obs, const std::vector<int>& candidate_features,
                               const std::optional<Vec>& weights) const {
    std::vector<int> scored;
    scored.reserve(candidate_features.size());
    for (int f : candidate_features) scored.push_back(scored_feature(tape, f));
    return logits_from_scored(tape, obs, scored, weights);
}

int PolicyModel::value_estimate(Tape& tape, int obs) const {
    return tape.affine("value_w", "value_b", obs);
}

Vec PolicyModel::encode_reference_value(const std::vector<int>& ref_tokens,
                                        const std::vector<int>& query_tokens) const {
    Tape tape(&params);
    return tape.value(encode_reference(tape, ref_tokens, query_tokens));
}

Vec PolicyModel::score_actions(const Vec& obs, const std::vector<Vec>& candidate_features,
                               const std::optional<Vec>& weights) const {
    Tape tape(&params);
    int o = tape.input(obs);
    std::vector<int> feats;
    for (const auto& f : candidate_features) feats.push_back(tape.input(f));
    int logits = action_logits(tape, o, feats, weights);
    return tape.softmax_value(logits);
}

void PolicyModel::save(const std::string& path) const {
    nlohmann::ordered_json meta;
    meta["kind"] = "policy";
    meta["d"] = dim;
    meta["vocab_size"] = vocab_size;
    meta["vocab_hash"] = vocab_hash;
    save_params(params, meta, path);
}

PolicyModel PolicyModel::load(const std::string& path) {
    nlohmann::json meta;
    PolicyModel m;
    m.params = load_params(path, &meta);
    if (meta.value("kind", std::string()) != "policy")
        throw std::runtime_error("checkpoint is not a policy model: " + path);
    m.dim = meta.at("d").get<int>();
    m.vocab_size = meta.at("vocab_size").get<std::size_t>();
    m.vocab_hash = meta.at("vocab_hash").get<std::uint64_t>();
    return m;
}

}  // namespace refnav
