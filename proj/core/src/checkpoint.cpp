#include "acae/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace acae {
namespace {

constexpr char kMagic[4] = {'A', 'C', 'A', 'E'};

// The on-disk format is little-endian; this implementation targets
// little-endian hosts and writes native doubles directly.
static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

template <typename T>
void write_pod(std::ofstream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
bool read_pod(std::ifstream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    return static_cast<bool>(in);
}

std::size_t payload_bytes(std::size_t users, std::size_t items, std::size_t hidden) {
    const std::size_t doubles =
        hidden * items + items * hidden + hidden + items + hidden * users;
    return sizeof(kMagic) + sizeof(std::uint32_t) + 3 * sizeof(std::uint64_t) + 2 +
           doubles * sizeof(double);
}

}  // namespace

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
    validate_shapes(params);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("cannot write checkpoint: " + path.string());

    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kCheckpointVersion);
    write_pod(out, static_cast<std::uint64_t>(params.user_count));
    write_pod(out, static_cast<std::uint64_t>(params.item_count));
    write_pod(out, static_cast<std::uint64_t>(params.hidden_dim));
    write_pod(out, static_cast<std::uint8_t>(params.encoder_act));
    write_pod(out, static_cast<std::uint8_t>(params.decoder_act));
    for (const Matrix* m : {&params.w1, &params.w2, &params.b1, &params.b2, &params.p}) {
        out.write(reinterpret_cast<const char*>(m->values.data()),
                  static_cast<std::streamsize>(m->size() * sizeof(double)));
    }
    if (!out) throw CheckpointError("failed writing checkpoint: " + path.string());
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint: " + path.string());

    const std::uintmax_t actual_bytes = std::filesystem::file_size(path);

    char magic[4] = {};
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw CheckpointError("not a checkpoint (bad magic): " + path.string());
    }
    std::uint32_t version = 0;
    if (!read_pod(in, version)) throw CheckpointError("truncated checkpoint header: " + path.string());
    if (version != kCheckpointVersion) {
        throw CheckpointError("checkpoint format version " + std::to_string(version) +
                              " not supported (expected " + std::to_string(kCheckpointVersion) +
                              "): " + path.string());
    }

    std::uint64_t users = 0, items = 0, hidden = 0;
    std::uint8_t enc = 0, dec = 0;
    if (!read_pod(in, users) || !read_pod(in, items) || !read_pod(in, hidden) ||
        !read_pod(in, enc) || !read_pod(in, dec)) {
        throw CheckpointError("truncated checkpoint header: " + path.string());
    }
    if (enc > 1 || dec > 1) throw CheckpointError("checkpoint has unknown activation tag");

    const std::size_t expected = payload_bytes(users, items, hidden);
    if (actual_bytes != expected) {
        throw CheckpointError("checkpoint size mismatch: expected " + std::to_string(expected) +
                              " bytes, found " + std::to_string(actual_bytes) + ": " +
                              path.string());
    }

    ModelParams params = make_params(users, items, hidden, static_cast<Activation>(enc),
                                     static_cast<Activation>(dec));
    for (Matrix* m : {&params.w1, &params.w2, &params.b1, &params.b2, &params.p}) {
        in.read(reinterpret_cast<char*>(m->values.data()),
                static_cast<std::streamsize>(m->size() * sizeof(double)));
        if (!in) throw CheckpointError("truncated checkpoint payload: " + path.string());
    }
    return params;
}

}  // namespace acae
