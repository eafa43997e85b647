#!/usr/bin/env python3

"""
Setup script for cyclo-slv
"""

from setuptools import setup, find_packages

# Read runtime requirements from requirements_minimal.txt
with open('requirements_minimal.txt') as f:
    requirements = [line.strip() for line in f if line.strip() and not line.startswith('#')]

# Read long description from README.md
with open('README.md', encoding='utf-8') as f:
    long_description = f.read()

setup(
    name="cyclo-slv",
    version="1.0.0",
    description="Exact cyclotomic divisibility, SLV sets and Favard length estimates",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    py_modules=["main"],
    install_requires=requirements,
    extras_require={
        "test": ["pytest>=7.2.0", "pytest-cov>=4.0.0", "sympy>=1.10"],
    },
    python_requires=">=3.8",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    entry_points={
        "console_scripts": [
            "cyclo-slv=main:main",
        ],
    },
)
