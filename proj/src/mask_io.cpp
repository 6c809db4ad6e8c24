#include "sgattn/mask_io.hpp"

#include "sgattn/errors.hpp"

#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <vector>

namespace sgattn {

namespace {

void put_u32le(std::ostream& out, std::uint32_t v) {
    const unsigned char bytes[4] = {
        static_cast<unsigned char>(v & 0xff),
        static_cast<unsigned char>((v >> 8) & 0xff),
        static_cast<unsigned char>((v >> 16) & 0xff),
        static_cast<unsigned char>((v >> 24) & 0xff),
    };
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_header(std::ostream& out, std::uint32_t n, MaskDType dtype) {
    out.write(reinterpret_cast<const char*>(kMaskMagic.data()), kMaskMagic.size());
    put_u32le(out, kMaskFormatVersion);
    put_u32le(out, n);
    const unsigned char d = static_cast<unsigned char>(dtype);
    out.write(reinterpret_cast<const char*>(&d), 1);
}

} // namespace

void write_mask(std::ostream& out, const LocalRangeMask& mask) {
    const std::size_t n = mask.size();
    write_header(out, static_cast<std::uint32_t>(n), MaskDType::hard);
    const std::size_t row_bytes = (n + 7) / 8;
    std::vector<unsigned char> row(row_bytes);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(row.begin(), row.end(), 0);
        for (std::size_t j = 0; j < n; ++j)
            if (mask.at(i, j))
                row[j / 8] |= static_cast<unsigned char>(1u << (j % 8));
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row_bytes));
    }
    if (!out)
        throw Error("mask write failed");
}

void write_mask(std::ostream& out, const SoftMask& mask) {
    const std::size_t n = mask.size();
    write_header(out, static_cast<std::uint32_t>(n), MaskDType::soft);
    // Stored single-precision for interop; round-trip loss is below 1e-7 for
    // values in [0, 1].
    for (double w : mask.weights()) {
        const float f = static_cast<float>(w);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        put_u32le(out, bits);
    }
    if (!out)
        throw Error("mask write failed");
}

void write_mask(std::ostream& out, const MaskVariant& mask) {
    std::visit([&out](const auto& m) { write_mask(out, m); }, mask);
}

std::optional<MaskVariant> read_mask(std::istream& in) {
    unsigned char header[13];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (in.gcount() == 0 && in.eof())
        return std::nullopt;
    if (in.gcount() != static_cast<std::streamsize>(sizeof(header)))
        throw Error("mask record: truncated header");
    if (std::memcmp(header, kMaskMagic.data(), kMaskMagic.size()) != 0)
        throw Error("mask record: bad magic");
    const std::uint32_t version = get_u32le(header + 4);
    if (version != kMaskFormatVersion)
        throw Error("mask record: unsupported version " + std::to_string(version));
    const std::uint32_t n = get_u32le(header + 8);
    if (n == 0)
        throw Error("mask record: zero-sized mask");
    const unsigned char dtype = header[12];

    if (dtype == static_cast<unsigned char>(MaskDType::hard)) {
        const std::size_t row_bytes = (n + 7) / 8;
        std::vector<unsigned char> payload(static_cast<std::size_t>(n) * row_bytes);
        in.read(reinterpret_cast<char*>(payload.data()),
                static_cast<std::streamsize>(payload.size()));
        if (in.gcount() != static_cast<std::streamsize>(payload.size()))
            throw Error("mask record: truncated hard payload");
        LocalRangeMask mask(n);
        for (std::size_t i = 0; i < n; ++i) {
            const unsigned char* row = payload.data() + i * row_bytes;
            for (std::size_t j = 0; j < n; ++j)
                mask.set(i, j, (row[j / 8] >> (j % 8)) & 1u);
        }
        return MaskVariant(std::move(mask));
    }
    if (dtype == static_cast<unsigned char>(MaskDType::soft)) {
        std::vector<unsigned char> payload(static_cast<std::size_t>(n) * n * 4);
        in.read(reinterpret_cast<char*>(payload.data()),
                static_cast<std::streamsize>(payload.size()));
        if (in.gcount() != static_cast<std::streamsize>(payload.size()))
            throw Error("mask record: truncated soft payload");
        SoftMask mask(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const std::uint32_t bits = get_u32le(payload.data() + (i * n + j) * 4);
                float f;
                std::memcpy(&f, &bits, 4);
                mask.set(i, j, static_cast<double>(f));
            }
        }
        return MaskVariant(std::move(mask));
    }
    throw Error("mask record: unknown dtype " + std::to_string(dtype));
}

} // namespace sgattn
