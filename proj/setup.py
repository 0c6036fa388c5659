"""CMake-driven build of the lunggan._core extension module."""

import shutil
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
        root = Path(__file__).resolve().parent
        build_dir = root / "build" / "pyext"
        build_dir.mkdir(parents=True, exist_ok=True)
        subprocess.run(
            [
                "cmake",
                str(root),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DLUNGGAN_BUILD_TESTS=OFF",
                "-DLUNGGAN_BUILD_CLI=OFF",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            cwd=build_dir,
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", ".", "--target", "lunggan_pycore"],
            cwd=build_dir,
            check=True,
        )
        built = sorted((build_dir / "python" / "lunggan").glob("_core*"))
        if not built:
            raise RuntimeError("cmake did not produce the _core extension")
        dest = Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(built[0], dest)


setup(
    packages=["lunggan"],
    package_dir={"": "python"},
    ext_modules=[CMakeExtension("lunggan._core")],
    cmdclass={"build_ext": CMakeBuild},
    zip_safe=False,
)
