#pragma once

#include "hdt/pair.hpp"

namespace hdt::detail {

/// Re-labels a certified pair; mode is kept from certification.
void set_pair_metadata(TransmissionPair& pair, const PairMetadata& meta);

}  // namespace hdt::detail
