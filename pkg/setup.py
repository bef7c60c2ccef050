"""
Setup script for the gencalc package.

This module handles the installation and package configuration of gencalc,
defining dependencies, metadata, and the command-line entry point.
"""
from setuptools import find_packages, setup

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="gencalc",
    version="1.0.0",
    description="Generalized derivatives, Sturm-Liouville spectra and fractional-time mechanics",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(include=["gencalc", "gencalc.*"]),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.24",
        "scipy>=1.10",  # QUADPACK, brentq, solve_ivp, cKDTree, CubicHermiteSpline
        "python-dotenv>=1.0.0",
        "pydantic>=2.5.2",
        "pydantic-settings>=2.1.0",
    ],
    extras_require={
        "dev": [
            "pytest>=8.2.0",
            "pytest-cov>=4.1.0",
            "black>=24.3.0",
            "flake8>=6.0.0",
            "isort>=5.12.0",
            "mypy>=1.3.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "gencalc=gencalc.main:main",
        ],
    },
)
