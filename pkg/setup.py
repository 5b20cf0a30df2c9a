from setuptools import setup, find_packages

setup(
    name="btcgp",
    version="0.1.0",
    description="Banded training covariance Gaussian processes for 1-D series",
    author="btcgp",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "pandas>=2.0.0",
        "pydantic>=2.0.0",
        "pyyaml>=6.0.0",
        "python-dotenv>=1.0.0",
    ],
    extras_require={
        "dev": [
            "pytest>=7.4.0",
            "pytest-cov>=4.1.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "btcgp=btcgp.cli:main",
        ],
    },
    python_requires=">=3.9",
)
