#include "roadseg/core.hpp"

namespace roadseg {

const char* road_class_name(RoadClass c) {
    switch (c) {
        case RoadClass::no_road: return "no_road";
        case RoadClass::small: return "small";
        case RoadClass::medium: return "medium";
        case RoadClass::big: return "big";
    }
    return "?";
}

std::array<uint8_t, kOrdinalChannels> encode_ordinal(RoadClass c) {
    int k = static_cast<int>(c);
    if (k < 0 || k >= kNumClasses)
        throw std::invalid_argument("encode_ordinal: class out of range: " + std::to_string(k));
    std::array<uint8_t, kOrdinalChannels> bits{};
    for (int i = 0; i < k; ++i) bits[static_cast<size_t>(i)] = 1;
    return bits;
}

RoadClass decode_ordinal(const std::array<uint8_t, kOrdinalChannels>& bits) {
    int k = 0;
    while (k < kOrdinalChannels && bits[static_cast<size_t>(k)] != 0) ++k;
    return static_cast<RoadClass>(k);
}

OrdinalMask threshold_probs(const Tensor& probs, double t) {
    if (!(t > 0.0 && t < 1.0))
        throw std::invalid_argument("threshold_probs: t must lie in (0,1), got " +
                                    std::to_string(t));
    if (probs.rank() != 3 || probs.dim(0) != kOrdinalChannels)
        throw std::invalid_argument("threshold_probs: expected shape (3,H,W), got " +
                                    shape_string(probs.shape));
    OrdinalMask mask;
    mask.bits.resize(probs.shape);
    const float ft = static_cast<float>(t);
    for (int64_t i = 0; i < probs.numel(); ++i)
        mask.bits.v[static_cast<size_t>(i)] = probs.v[static_cast<size_t>(i)] > ft ? 1 : 0;
    return mask;
}

ByteTensor encode_ordinal_raster(const ByteTensor& classes) {
    if (classes.rank() != 2)
        throw std::invalid_argument("encode_ordinal_raster: expected (H,W) raster");
    const int64_t hw = classes.numel();
    ByteTensor bits({kOrdinalChannels, classes.dim(0), classes.dim(1)});
    for (int k = 0; k < kOrdinalChannels; ++k) {
        uint8_t* out = bits.data() + k * hw;
        for (int64_t i = 0; i < hw; ++i) out[i] = classes.v[static_cast<size_t>(i)] > k ? 1 : 0;
    }
    return bits;
}

ByteTensor decode_ordinal_raster(const ByteTensor& bits) {
    if (bits.rank() != 3 || bits.dim(0) != kOrdinalChannels)
        throw std::invalid_argument("decode_ordinal_raster: expected (3,H,W) bits");
    const int64_t hw = bits.dim(1) * bits.dim(2);
    ByteTensor classes({bits.dim(1), bits.dim(2)});
    const uint8_t* b0 = bits.data();
    const uint8_t* b1 = bits.data() + hw;
    const uint8_t* b2 = bits.data() + 2 * hw;
    for (int64_t i = 0; i < hw; ++i) {
        uint8_t k = 0;
        if (b0[i]) {
            k = 1;
            if (b1[i]) {
                k = 2;
                if (b2[i]) k = 3;
            }
        }
        classes.v[static_cast<size_t>(i)] = k;
    }
    return classes;
}

}  // namespace roadseg
