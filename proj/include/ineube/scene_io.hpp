// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Scene directories: dry.wav, noise.wav, mixture.wav (float32) and meta.txt
// (key=value). A scene set is a directory of scene directories.

#ifndef INEUBE_SCENE_IO_HPP_
#define INEUBE_SCENE_IO_HPP_

#include <filesystem>
#include <span>
#include <vector>

#include "ineube/simulate.hpp"

namespace ineube {

void WriteSceneDir(const Scene& scene, const std::filesystem::path& dir);

// RIRs are not stored; the returned scene has empty rir_speech / rir_noise.
Scene ReadSceneDir(const std::filesystem::path& dir);

void WriteSceneSet(std::span<const Scene> scenes, const std::filesystem::path& dir);

// Subdirectories of dir containing meta.txt, in lexicographic order. A
// directory that is itself a scene yields just that directory.
std::vector<std::filesystem::path> ListSceneDirs(const std::filesystem::path& dir);

std::vector<Scene> ReadSceneSet(const std::filesystem::path& dir);

}  // namespace ineube

#endif  // INEUBE_SCENE_IO_HPP_
