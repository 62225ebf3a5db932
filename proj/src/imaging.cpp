#include "tgpsr/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tgpsr {

void ImageSpec::validate() const {
    if (encoded_size == 0) throw Error(ErrorCode::invalid_spec, "encoded image size must be positive");
    if (payload_size == 0) throw Error(ErrorCode::invalid_spec, "payload size must be positive");
    if (packet_count) {
        if (*packet_count == 0) throw Error(ErrorCode::invalid_spec, "packet count must be positive");
        if (*packet_count * payload_size < encoded_size)
            throw Error(ErrorCode::invalid_spec, "packet count too small to carry the encoded image");
    }
}

std::size_t ImageSpec::fragment_count() const {
    validate();
    if (packet_count) return *packet_count;
    return (encoded_size + payload_size - 1) / payload_size;
}

std::vector<Fragment> fragment(const ImageSpec& spec, ImageId image, const std::vector<std::uint8_t>& content) {
    const std::size_t n = spec.fragment_count();
    if (!content.empty() && content.size() != spec.encoded_size)
        throw Error(ErrorCode::invalid_spec, "content is " + std::to_string(content.size()) +
                                                 " bytes, expected " + std::to_string(spec.encoded_size));
    std::vector<Fragment> out;
    out.reserve(n);
    const std::size_t base = spec.encoded_size / n;
    const std::size_t extra = spec.encoded_size % n;
    std::size_t offset = 0;
    for (std::size_t i = 0; i < n; ++i) {
        Fragment f;
        f.image = image;
        f.index = static_cast<std::uint32_t>(i);
        f.payload_bytes = base + (i < extra ? 1 : 0);
        if (!content.empty()) {
            f.bytes.assign(content.begin() + static_cast<std::ptrdiff_t>(offset),
                           content.begin() + static_cast<std::ptrdiff_t>(offset + f.payload_bytes));
        }
        offset += f.payload_bytes;
        out.push_back(std::move(f));
    }
    return out;
}

const char* to_string(ImageQuality q) {
    switch (q) {
    case ImageQuality::complete: return "complete";
    case ImageQuality::usable: return "usable";
    case ImageQuality::unusable: return "unusable";
    }
    return "?";
}

ImageQuality classify(double loss_ratio) {
    if (!(loss_ratio >= 0.0) || !(loss_ratio <= 1.0))
        throw Error(ErrorCode::invalid_input, "loss ratio outside [0, 1]: " + std::to_string(loss_ratio));
    if (loss_ratio == 0.0) return ImageQuality::complete;
    if (loss_ratio > kUnusableLossThreshold) return ImageQuality::unusable;
    return ImageQuality::usable;
}

ReassemblyBuffer::ReassemblyBuffer(ImageId image, NodeId source, std::size_t expected, double burst_start,
                                   double display_timer)
    : image_(image), source_(source), expected_(expected), burst_start_(burst_start), display_timer_(display_timer) {
    if (expected_ == 0) throw Error(ErrorCode::invalid_spec, "image with zero fragments");
}

std::optional<double> ReassemblyBuffer::deadline() const {
    if (!first_arrival_) return std::nullopt;
    return *first_arrival_ + display_timer_;
}

ReassemblyBuffer::Outcome ReassemblyBuffer::on_fragment(const Fragment& f, double now) {
    if (f.image != image_) throw Error(ErrorCode::invalid_input, "fragment belongs to another image");
    if (f.index >= expected_) throw Error(ErrorCode::invalid_input, "fragment index out of range");
    if (finalized_ || (first_arrival_ && now > *first_arrival_ + display_timer_)) {
        ++late_;
        return Outcome::late;
    }
    if (!first_arrival_) first_arrival_ = now;
    if (!received_.insert(f.index).second) return Outcome::duplicate;
    return complete() ? Outcome::completed : Outcome::accepted;
}

ImageResult ReassemblyBuffer::finalize(double now) {
    if (finalized_) return *finalized_;
    ImageResult r;
    r.image = image_;
    r.source = source_;
    r.expected = expected_;
    r.received = received_.size();
    r.received_any = first_arrival_.has_value();
    r.burst_start = burst_start_;
    r.loss_ratio = 1.0 - static_cast<double>(r.received) / static_cast<double>(expected_);
    if (r.received_any) {
        r.finalize_time = std::min(now, *first_arrival_ + display_timer_);
        r.latency = r.finalize_time - burst_start_;
        r.quality = classify(r.loss_ratio);
    } else {
        r.finalize_time = now;
    }
    finalized_ = r;
    return r;
}

} // namespace tgpsr
