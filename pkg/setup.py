from setuptools import setup, find_packages

setup(
    name="varifold_estimation",
    version="0.1.0",
    packages=find_packages(exclude=["tests"]),
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.26",
        "scipy>=1.11",
        "pot>=0.9",
        "ortools>=9.8",
        "tqdm>=4.66",
        "tomli>=2.0; python_version < '3.11'",
    ],
    entry_points={
        "console_scripts": ["varifold-estimation=src.main:main"],
    },
)
