import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    """Builds the pybind11 extension with the project's CMake setup."""

    def build_extension(self, ext):
        out_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        out_dir.mkdir(parents=True, exist_ok=True)
        build_dir = Path(self.build_temp) / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)
        source_dir = Path(__file__).resolve().parent

        try:
            import pybind11

            pybind11_dir = ["-Dpybind11_DIR=" + pybind11.get_cmake_dir()]
        except ImportError:
            pybind11_dir = []

        subprocess.run(
            [
                "cmake",
                str(source_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DFMUAD_BUILD_CLI=OFF",
                "-DFMUAD_BUILD_TESTS=OFF",
                "-DFMUAD_BUILD_PYTHON=ON",
                f"-DPython_EXECUTABLE={sys.executable}",
                f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={out_dir}",
            ]
            + pybind11_dir,
            cwd=build_dir,
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_fmuad", "--parallel"],
            cwd=build_dir,
            check=True,
        )


setup(
    packages=["fmuad"],
    package_dir={"fmuad": "python/fmuad"},
    ext_modules=[CMakeExtension("fmuad._fmuad")],
    cmdclass={"build_ext": CMakeBuild},
)
