#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "styleseg/volume.hpp"

namespace styleseg {

enum class VolumeFormat { Raw, Nifti };

// Raw format: `<stem>.hdr` (ASCII key/value header) + `<stem>.bin`
// (little-endian payload, x-fastest). See docs/formats.md for the exact
// layout. Paths may name either the .hdr or the stem.
void save_raw(const Volume& v, const std::filesystem::path& stem);
void save_raw_labels(const LabelVolume& l, const std::filesystem::path& stem);
Volume load_raw(const std::filesystem::path& path);
LabelVolume load_raw_labels(const std::filesystem::path& path);

// Minimal NIfTI-1 support: single-file `.nii` or gzipped `.nii.gz`, scalar
// 3D images, little- or big-endian headers on read, little-endian on write.
void save_nifti(const Volume& v, const std::filesystem::path& path);
void save_nifti_labels(const LabelVolume& l, const std::filesystem::path& path);
Volume load_nifti(const std::filesystem::path& path);
LabelVolume load_nifti_labels(const std::filesystem::path& path);

struct LoadedSample {
  Volume volume;
  std::optional<LabelVolume> labels;
};

// Loads a volume and, when a `<stem>_label` sidecar exists, its labels.
// `path` names the image file (.hdr/.nii/.nii.gz) or the raw stem.
LoadedSample load_volume(const std::filesystem::path& path, VolumeFormat format);

// Writes volume (and optional labels) under `stem`; raw produces
// stem.hdr/.bin (+ stem_label.hdr/.bin), nifti stem.nii.gz (+ stem_label.nii.gz).
void save_volume(const Volume& v, const LabelVolume* labels,
                 const std::filesystem::path& stem, VolumeFormat format);

}  // namespace styleseg
