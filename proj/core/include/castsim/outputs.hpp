#pragma once

#include <string>

#include "castsim/trial.hpp"

namespace castsim {

// Writes the deliverables of one trial under out_dir:
//   trial.json                           full trial log
//   frames/iter_NN/*.pgm + frames.idx    observed series per iteration
//   tip.csv, hand.csv                    final executed iteration
//   overlay/iter_NN/frame_KKK.svg        simulated-vs-observed snapshots
//   overlay/iter_NN/montage.svg
// frames_dir references inside the log are filled in before serialization.
void write_trial_outputs(TrialLog& log, const Scenario& scenario,
                         const std::string& out_dir, bool with_overlays = true);

void write_tip_csv(const std::vector<TimedPoint>& tip, const std::string& path);
void write_hand_csv(const HandTrajectory& hand, const std::string& path);
HandTrajectory read_hand_csv(const std::string& path);

// One simulated-vs-observed snapshot: observed pixels, simulated mass points,
// target box, obstacle, grasp marker.
std::string overlay_svg(const BinaryFrame& frame,
                        const std::vector<TimedState>& simulated,
                        const Scenario& scenario);

}  // namespace castsim
