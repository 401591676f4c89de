// Copyright 2025 The GASR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GASR_DECODER_HPP_
#define GASR_DECODER_HPP_

#include <string>
#include <vector>

#include "gasr/context_tree.hpp"
#include "gasr/graph_builder.hpp"
#include "gasr/lexicon.hpp"
#include "gasr/rng.hpp"
#include "gasr/types.hpp"

namespace gasr {

// Per-frame scores over tied states. Graph input label i scores entry
// i - 1 (label 0 is epsilon).
class AcousticScorer {
 public:
  virtual ~AcousticScorer() = default;
  virtual int NumFrames() const = 0;
  virtual int NumTiedStates() const = 0;
  virtual VectorX Scores(int t) const = 0;
};

// Test scorer standing in for a trained network: at frame t the
// reference state scores 0 and every other state -margin, plus uniform
// noise in [-noise, +noise]. The noise matrix is drawn once at
// construction so repeated Scores calls agree.
class OracleScorer : public AcousticScorer {
 public:
  OracleScorer(std::vector<int> reference, int num_tied_states,
               double margin, double noise, Rng* rng);

  int NumFrames() const override {
    return static_cast<int>(reference_.size());
  }
  int NumTiedStates() const override { return num_tied_states_; }
  VectorX Scores(int t) const override;

 private:
  std::vector<int> reference_;
  int num_tied_states_;
  double margin_;
  MatrixX noise_;  // states x frames; empty when noise == 0
};

struct Hypothesis {
  std::vector<std::string> words;
  double total_score = 0.0;
  std::vector<int> alignment;  // one tied-state id per frame
};

struct DecodeOptions {
  double beam = 1e30;
  double acoustic_scale = 1.0;
};

// Time-synchronous Viterbi over the decoding graph. Each frame every
// token takes its state's synthesized self-loop or an emitting arc,
// then non-emitting arcs close under a cost-ordered expansion; tokens
// worse than frame-best + beam are dropped. Throws SearchFailure when
// no token survives or no final state is reached.
Hypothesis Decode(const DecodingGraph& graph, const AcousticScorer& scorer,
                  int num_frames, const DecodeOptions& opts = {});

// Exhaustive reference decoder: full relaxation over all states per
// frame, no pruning. Oracle for Decode on small graphs.
Hypothesis BruteForceDecode(const DecodingGraph& graph,
                            const AcousticScorer& scorer, int num_frames,
                            double acoustic_scale = 1.0);

// Tied-state reference alignment for an oracle-scored utterance: the
// transcript's graphemes expand to tri-graphemes (no silences), each
// unit runs through `topology` positions, each position holds for
// frames_per_state frames.
std::vector<int> ReferenceTiedAlignment(const std::vector<std::string>& words,
                                        const Lexicon& lexicon,
                                        const DecisionTree& tree,
                                        int topology, int frames_per_state);

}  // namespace gasr

#endif  // GASR_DECODER_HPP_
