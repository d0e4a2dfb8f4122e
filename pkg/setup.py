from setuptools import find_packages, setup

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

# runtime requirements are the first block of requirements.txt
with open("requirements.txt", "r", encoding="utf-8") as fh:
    runtime = fh.read().split("\n\n")[0]
requirements = [line.strip() for line in runtime.splitlines() if line.strip()]

setup(
    name="mosg-solver",
    version="0.2.0",
    description="Pareto fronts of multi-objective security games",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
    install_requires=requirements,
    include_package_data=True,
    package_data={"mosg_solver": ["py.typed"]},
    entry_points={"console_scripts": ["mosg=mosg_solver.cli:main"]},
)
