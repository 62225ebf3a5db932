#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "tgpsr/types.hpp"

namespace tgpsr {

/// Image modeled as an opaque fragment stream. The defaults describe a
/// 320x320 8-bit grayscale capture encoded at quality factor 50.
struct ImageSpec {
    std::size_t raw_size = 102400;
    std::size_t encoded_size = 16621;
    std::size_t payload_size = 90;
    std::optional<std::size_t> packet_count = 205; // authoritative when set
    double quality_factor = 50.0;

    void validate() const;
    std::size_t fragment_count() const;
};

using ImageId = std::uint32_t;

struct Fragment {
    ImageId image = 0;
    std::uint32_t index = 0;
    std::size_t payload_bytes = 0;
    std::vector<std::uint8_t> bytes; // optional passthrough content
};

/// Splits the encoded image into fragment_count() fragments of near-equal
/// size (each at most payload_size). When `content` is non-empty it is
/// carried through verbatim and must be encoded_size bytes long.
std::vector<Fragment> fragment(const ImageSpec& spec, ImageId image, const std::vector<std::uint8_t>& content = {});

enum class ImageQuality { complete, usable, unusable };
const char* to_string(ImageQuality q);

inline constexpr double kUnusableLossThreshold = 0.60;
inline constexpr double kDefaultDisplayTimer = 10.0;

/// complete at zero loss, usable up to and including 60% loss, unusable above.
ImageQuality classify(double loss_ratio);

struct ImageResult {
    ImageId image = 0;
    NodeId source = kNoNode;
    std::size_t expected = 0;
    std::size_t received = 0;
    bool received_any = false;
    double burst_start = 0.0;
    double finalize_time = 0.0;
    double loss_ratio = 1.0;
    double latency = 0.0;
    std::optional<ImageQuality> quality; // unset when nothing arrived

    friend bool operator==(const ImageResult&, const ImageResult&) = default;
};

/// Order-independent reassembly with a display timer armed by the first
/// fragment.
class ReassemblyBuffer {
public:
    ReassemblyBuffer(ImageId image, NodeId source, std::size_t expected, double burst_start,
                     double display_timer = kDefaultDisplayTimer);

    enum class Outcome { accepted, duplicate, late, completed };

    /// Accepts a fragment; the first one starts the display timer.
    /// Throws Error(invalid_input) on an image id or index mismatch.
    Outcome on_fragment(const Fragment& f, double now);

    bool finalized() const { return finalized_.has_value(); }
    bool started() const { return first_arrival_.has_value(); }
    bool complete() const { return received_.size() == expected_; }
    std::optional<double> deadline() const;
    std::size_t received_count() const { return received_.size(); }
    std::size_t late_count() const { return late_; }

    /// Closes the buffer at min(now, deadline).
    ImageResult finalize(double now);

private:
    ImageId image_;
    NodeId source_;
    std::size_t expected_;
    double burst_start_;
    double display_timer_;
    std::optional<double> first_arrival_;
    std::set<std::uint32_t> received_;
    std::size_t late_ = 0;
    std::optional<ImageResult> finalized_;
};

} // namespace tgpsr
