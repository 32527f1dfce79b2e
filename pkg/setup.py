from setuptools import setup, find_packages

setup(
    name="coarse_toolkit",
    version="0.1.0",
    packages=find_packages(where="src"),
    package_dir={"":"src"},
    install_requires=[
        "networkx>=3.1",
        "pydantic>=2.4.0",
        "numpy>=1.24",
        "scipy>=1.10",
    ],
    entry_points={
        "console_scripts": [
            "coarse-toolkit=coarse_toolkit.cli.main:main",
        ],
    },
    python_requires=">=3.10",
    author="Omar El Mountassir",
    author_email="omar.mountassir@gmail.com",
    description="Coarse geometry of finite extended metric spaces: gluing, filtrations and weighted Rips metrics",
    keywords="coarse geometry, metric spaces, rips complex, filtrations",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
