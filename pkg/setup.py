from setuptools import setup, find_packages

version = '0.1.0'


setup(
    name="chernoff_info",
    version=version,
    description="Chernoff information, skew Jensen divergences and Bayes error bounds for exponential families.",
    install_requires=["numpy", "scipy"],
    extras_require={"test": ["pytest"]},
    packages=find_packages(exclude=["tests"]),
    include_package_data=True,
    scripts=["scripts/compute_chernoff.py"]
)
