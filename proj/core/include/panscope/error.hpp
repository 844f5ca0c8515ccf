#pragma once

#include <stdexcept>
#include <string>

namespace panscope {

enum class ErrorCode {
    invalid_argument,
    invalid_padding,
    shape_mismatch,
    degenerate_map,
    empty_sample,
    format,
    io,
    plant_failure,
    unknown_neuron,
    insufficient_neurons,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace panscope
