#include "emms/neural/train.hpp"

namespace emms::neural {

template LossParts joint_loss<float>(ModelBundle<float>&, const JointBatch<float>&,
                                     const std::vector<float>&, bool);
template LossParts joint_loss<double>(ModelBundle<double>&, const JointBatch<double>&,
                                      const std::vector<double>&, bool);
template EpochStats evaluate<float>(ModelBundle<float>&, const JointBatch<float>&);
template EpochStats evaluate<double>(ModelBundle<double>&, const JointBatch<double>&);
template JointBatch<float> make_batch<float>(const shapes::Dataset&, const std::vector<int>&);
template JointBatch<double> make_batch<double>(const shapes::Dataset&, const std::vector<int>&);
template TrainReport train<float>(ModelBundle<float>&, const shapes::Dataset&,
                                  const TrainConfig&);
template TrainReport train<double>(ModelBundle<double>&, const shapes::Dataset&,
                                   const TrainConfig&);

} // namespace emms::neural
