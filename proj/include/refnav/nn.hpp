#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "refnav/corpus.hpp"
#include "refnav/params.hpp"
#include "refnav/tape.hpp"

namespace refnav {

// The differentiable core: reference/query encoder, gated recurrent
// observation update, bilinear policy scorer and linear value head.
//
// Parameter names and shapes:
//   embed    (vocab x d)    token embedding table (row 0 = unk, row 1 = pad)
//   enc_w    (d x 2d)       projection of [mean(ref); mean(query)]
//   gru_wz, gru_uz (d x d), gru_bz (d)   update gate
//   gru_w,  gru_u  (d x d), gru_b  (d)   candidate state
//   score_w  (d x d)        bilinear policy scoring
//   value_w  (1 x d), value_b (1)        value head
struct PolicyModel {
    ParamStore params;
    int dim = 64;
    std::size_t vocab_size = 0;
    std::uint64_t vocab_hash = 0;

    static PolicyModel init(const Vocabulary& vocab, int dim, std::uint64_t seed);

    // tape-building ops; returned ints are node ids on the tape
    int encode_reference(Tape& tape, const std::vector<int>& ref_tokens,
                         const std::vector<int>& query_tokens) const;
    int update_observation(Tape& tape, int prev_obs, int feature) const;
    int action_logits(Tape& tape, int obs, const std::vector<int>& candidate_features,
                      const std::optional<Vec>& weights = std::nullopt) const;
    // split form of action_logits so rollouts can cache W_g * feature per
    // candidate across steps of an episode
    int scored_feature(Tape& tape, int feature) const;
    int logits_from_scored(Tape& tape, int obs, const std::vector<int>& scored_features,
                           const std::optional<Vec>& weights = std::nullopt) const;
    int value_estimate(Tape& tape, int obs) const;

    // value-only convenience wrappers (throwaway tape)
    Vec encode_reference_value(const std::vector<int>& ref_tokens,
                               const std::vector<int>& query_tokens) const;
    Vec score_actions(const Vec& obs, const std::vector<Vec>& candidate_features,
                      const std::optional<Vec>& weights = std::nullopt) const;

    void save(const std::string& path) const;
    static PolicyModel load(const std::string& path);
};

}  // namespace refnav
