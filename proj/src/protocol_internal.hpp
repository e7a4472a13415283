#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hdt/protocol.hpp"

namespace hdt::detail {

void validate_bits(std::span<const std::uint8_t> bits, const TransmissionPair& pair);
void validate_fault(const std::optional<Fault>& fault, const TransmissionPair& pair);

/// bits as a Z_6 vector with coordinate p replaced by value.
ResidueVector with_coordinate(std::span<const std::uint8_t> bits, std::size_t p, Residue value);

/// Non-throwing receiver steps; false (and errored set) on a violation.
bool step_subtractive(ReceiverState& state, Residue observed);
bool step_periodic(ReceiverState& state, std::span<const Residue> six);

/// Finalizes every receiver and packages the result.
RoundResult finish_round(RoundTranscript transcript, std::vector<ReceiverState>& states,
                         std::size_t violations);

}  // namespace hdt::detail
