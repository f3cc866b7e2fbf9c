"""Builds the _fpc pybind11 extension through the project's CMake tree."""

import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp) / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        ext_path = Path(self.get_ext_fullpath(ext.name)).resolve()
        ext_path.parent.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DFPC_BUILD_PYTHON=ON",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_fpc",
             "-j", str(os.cpu_count() or 1)],
            check=True,
        )

        built = list((build_dir / "src" / "python").glob("_fpc*.so"))
        if not built:
            raise RuntimeError("cmake did not produce the _fpc extension")
        self.copy_file(str(built[0]), str(ext_path))


setup(
    ext_modules=[CMakeExtension("fpc._fpc")],
    cmdclass={"build_ext": CMakeBuild},
)
