from setuptools import setup, find_packages
from os import path

here = path.abspath(path.dirname(__file__))

# Get the long description from the README file
with open(path.join(here, "README.md"), encoding="utf-8") as f:
    long_description = f.read()

setup(
    name="cellmix",
    version="0.1.0",
    description="Mixing and enhanced dissipation by randomly shifted cellular flows",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3.7",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    keywords="mixing passive scalar cellular flow pseudo-spectral",
    packages=find_packages(exclude=["docs", "tests"]),
    python_requires=">=3.7",
    install_requires=["numpy", "scipy", "pandas"],
    extras_require={
        "dev": ["black", "pylint"],
        "test": ["pytest", "pytest-cov", "pytest-benchmark"],
    },
    entry_points={"console_scripts": ["cellmix = cellmix.cli:main"]},
)
